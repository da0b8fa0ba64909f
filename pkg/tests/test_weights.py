import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from abel_midpoint import (
    DomainError,
    SingularError,
    WeightTable,
    compute_beta,
    compute_correction_weights,
    compute_omega,
    compute_omega_inv,
    compute_tau,
    gamma_fn,
)

mp.mp.dps = 40
ALPHAS = [round(0.1 * k, 1) for k in range(1, 10)]


def mp_omega(alpha, s):
    a = mp.mpf(alpha)
    return ((s + 1) ** a - mp.mpf(s) ** a) / mp.gamma(a + 1)


def mp_tau(alpha, n):
    a = mp.mpf(alpha)
    n = mp.mpf(n)
    return ((n + 1) ** (a + 1) - n ** (a + 1)) / mp.gamma(a + 2) - (
        (n + 1) ** a + n**a
    ) / (2 * mp.gamma(a + 1))


# -- gamma ------------------------------------------------------------------


@pytest.mark.parametrize("x, expected", [(1.0, 1.0), (2.0, 1.0), (1.5, math.sqrt(math.pi) / 2)])
def test_gamma_known_values(x, expected):
    assert gamma_fn(x) == pytest.approx(expected, rel=1e-15)


@given(st.floats(min_value=1e-3, max_value=5.0))
@settings(max_examples=200, deadline=None)
def test_gamma_relative_accuracy(x):
    ref = mp.gamma(mp.mpf(x))
    assert abs(gamma_fn(x) - float(ref)) <= 1e-13 * abs(float(ref))


@pytest.mark.parametrize("x", [0.0, -1.0, math.nan, math.inf])
def test_gamma_rejects_bad_arguments(x):
    with pytest.raises(DomainError):
        gamma_fn(x)


# -- omega ------------------------------------------------------------------


def test_omega_classical_case_is_all_ones():
    assert np.array_equal(compute_omega(1.0, 10), np.ones(11))


def test_omega_half_first_entries():
    om = compute_omega(0.5, 4)
    assert om[0] == pytest.approx(1.1283791670955126, rel=1e-14)
    assert om[1] == pytest.approx(0.46738995451021814, rel=1e-14)


@pytest.mark.parametrize("alpha", [0.1, 0.37, 0.5, 0.9])
def test_omega_matches_high_precision(alpha):
    om = compute_omega(alpha, 5000)
    for s in [0, 1, 2, 7, 8, 9, 100, 4999, 5000]:
        ref = float(mp_omega(alpha, s))
        assert abs(om[s] - ref) <= 1e-14 * ref


def test_omega_asymptotics():
    alpha, n = 0.3, 100000
    om = compute_omega(alpha, n)
    lead = n ** (alpha - 1) / math.gamma(alpha)
    assert abs(om[n] - lead) <= 10 * n ** (alpha - 2)


@pytest.mark.parametrize("alpha", [0.0, -0.1, 1.01, math.nan])
def test_omega_rejects_bad_order(alpha):
    with pytest.raises(DomainError):
        compute_omega(alpha, 4)


@pytest.mark.parametrize("n_max", [0, -3, 2.5])
def test_omega_rejects_bad_length(n_max):
    with pytest.raises(DomainError):
        compute_omega(0.5, n_max)


@pytest.mark.parametrize("alpha", ALPHAS)
def test_omega_positive_with_increasing_ratios(alpha):
    om = compute_omega(alpha, 4096)
    assert np.all(om > 0)
    r = om[1:] / om[:-1]
    assert np.all(np.diff(r) > 0)


# -- tau --------------------------------------------------------------------


def test_tau_vanishes_for_classical_rule():
    assert np.array_equal(compute_tau(1.0, 20), np.zeros(21))


def test_tau_half_at_zero():
    assert compute_tau(0.5, 2)[0] == pytest.approx(0.18806319451591876, rel=1e-14)


@pytest.mark.parametrize("alpha", [0.1, 0.5, 0.77, 0.9])
def test_tau_matches_high_precision(alpha):
    tau = compute_tau(alpha, 3000)
    for n in [0, 1, 2, 3, 7, 8, 50, 1000, 3000]:
        ref = float(mp_tau(alpha, n))
        assert abs(tau[n] - ref) <= 2e-13 * abs(ref), n


def test_tau_tail_constant():
    alpha, n = 0.5, 10**6
    tau = compute_tau(alpha, n)
    limit = (1 - alpha) / (12 * math.gamma(alpha))
    assert abs(n ** (2 - alpha) * tau[n] - limit) <= 1e-4


# -- omega_inv and beta -----------------------------------------------------


def test_omega_inv_classical():
    assert np.array_equal(compute_omega_inv(np.ones(6)), [1, -1, 0, 0, 0, 0])


def test_omega_inv_leading_entry():
    inv = compute_omega_inv(compute_omega(0.5, 8))
    assert inv[0] == pytest.approx(0.886226925452758, rel=1e-15)


def test_omega_inv_zero_leading_coefficient():
    with pytest.raises(SingularError) as exc:
        compute_omega_inv(np.array([0.0, 1.0]))
    assert exc.value.index == 0


@pytest.mark.parametrize("alpha", ALPHAS)
def test_omega_inv_signs_and_partial_sums(alpha):
    inv = WeightTable.build(alpha, 4096).omega_inv
    assert inv[0] > 0 and np.all(inv[1:] < 0)
    assert abs(inv[0] - math.gamma(alpha + 1)) <= 1e-12
    partial = np.cumsum(-inv[1:])
    assert np.all(partial < inv[0])


def test_omega_inv_decay_bounded():
    alpha, n = 0.5, 4096
    inv = WeightTable.build(alpha, n).omega_inv
    k = np.arange(1, n + 1)
    scaled = k ** (alpha + 1) * np.abs(inv[1:])
    assert np.max(scaled) < 1.0


def test_beta_classical():
    assert np.array_equal(compute_beta(np.array([1.0, -1.0, 0.0, 0.0])), [1, 0, 0, 0])


@pytest.mark.parametrize("alpha", [0.2, 0.5, 0.8])
def test_beta_starts_at_gamma_and_decays(alpha):
    t = WeightTable.build(alpha, 4096)
    assert t.beta[0] == t.omega_inv[0]
    assert np.all(t.beta >= 0) and np.all(np.diff(t.beta) <= 0)
    n = np.arange(1, t.beta.size + 1)
    assert np.max(n**alpha * t.beta) <= 2 * math.gamma(alpha + 1)


# -- correction weights -----------------------------------------------------


def test_correction_weights_vanish_for_classical_rule():
    w = WeightTable.build(1.0, 10).w_start
    assert np.all(w == 0)


def test_correction_weights_first_rows():
    tau = compute_tau(0.5, 4)
    w = compute_correction_weights(tau, 4)
    assert tuple(w[0]) == (-tau[0], tau[0])
    s = float(mp_tau(0.5, 0) + mp_tau(0.5, 1))
    assert w[1, 1] == pytest.approx(s, rel=1e-14)
    assert w[1, 0] == -w[1, 1]


def test_correction_weights_bounded():
    w = WeightTable.build(0.3, 20000).w_start
    assert np.all(w[:, 0] == -w[:, 1])
    # the series of tau converges, so the partial sums settle
    assert abs(w[-1, 1] - w[-2000, 1]) < 1e-3


def test_correction_weights_short_tau():
    with pytest.raises(ValueError):
        compute_correction_weights(np.ones(3), 5)


# -- table ------------------------------------------------------------------


@pytest.mark.parametrize("alpha", ALPHAS + [1.0])
def test_reciprocal_identity(alpha):
    t = WeightTable.build(alpha, 4096)
    prod = np.convolve(t.omega, t.omega_inv)[: t.n_max + 1]
    unit = np.zeros_like(prod)
    unit[0] = 1
    assert np.max(np.abs(prod - unit)) <= 1e-10


def test_table_shapes_and_immutability():
    t = WeightTable.build(0.5, 16)
    assert t.omega.shape == t.omega_inv.shape == t.tau.shape == (17,)
    assert t.beta.shape == (17,)
    assert t.w_start.shape == (16, 2)
    assert t.covers(16) and not t.covers(17)
    with pytest.raises(ValueError):
        t.omega[0] = 0.0
    d = t.to_dict()
    assert d["alpha"] == 0.5 and len(d["w_start"]) == 16


@given(st.floats(min_value=0.05, max_value=1.0), st.integers(min_value=1, max_value=300))
@settings(max_examples=60, deadline=None)
def test_table_properties(alpha, n):
    t = WeightTable.build(alpha, n)
    assert np.all(t.omega > 0)
    assert np.all(t.w_start[:, 0] == -t.w_start[:, 1])
    assert np.all(t.beta >= -1e-15)
    assert abs(t.omega_inv[0] - math.gamma(alpha + 1)) <= 1e-12
