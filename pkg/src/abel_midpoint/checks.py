"""Executable invariant suite for the weights and their generating series.

Each check returns a :class:`CheckResult`; the suite never raises on a failed
invariant, so callers can report every line.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .series import (
    PowerSeries,
    binomial_series,
    convolve,
    disc_min_modulus,
    kaluza_certificate,
    omega_lower_bound,
    r_series,
    reciprocal,
)
from .weights import WeightTable, gamma_fn

SLOPE_TOL = 0.1


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}" + (f": {self.detail}" if self.detail else "")


def decay_slope(values: np.ndarray, n_lo: int, n_hi: int) -> float:
    """Slope of ``log|values[n]|`` against ``log n`` for ``n_lo <= n <= n_hi``."""
    n = np.arange(n_lo, n_hi + 1)
    slope, _ = np.polyfit(np.log(n), np.log(np.abs(values[n])), 1)
    return float(slope)


def _signs(t: WeightTable) -> CheckResult:
    inv = t.omega_inv
    if t.alpha == 1.0:
        ok = inv[0] == 1.0 and inv[1] == -1.0 and np.all(inv[2:] == 0.0)
        return CheckResult("omega_inv sign pattern", bool(ok), "alpha=1: (1, -1, 0, ...)")
    bad = np.flatnonzero(inv[1:] >= 0.0)
    ok = inv[0] > 0.0 and bad.size == 0
    detail = "" if ok else f"first nonnegative entry at n={int(bad[0]) + 1}" if bad.size else "omega_inv[0] <= 0"
    return CheckResult("omega_inv sign pattern", bool(ok), detail)


def _sum_identity(t: WeightTable) -> CheckResult:
    inv = t.omega_inv
    target = gamma_fn(t.alpha + 1.0)
    err0 = abs(inv[0] - target)
    partial = np.cumsum(np.abs(inv[1:]))
    increasing = bool(np.all(np.diff(partial) >= 0.0))
    below = bool(np.all(partial <= inv[0] * (1.0 + 1e-14)))
    ok = err0 <= 1e-12 and increasing and below
    return CheckResult(
        "omega_inv[0] = Gamma(alpha+1) >= partial sums of |omega_inv[n]|",
        ok,
        f"|omega_inv[0]-Gamma|={err0:.2e}, gap={inv[0] - partial[-1]:.3e}",
    )


def _omega_ratio(t: WeightTable) -> CheckResult:
    if t.alpha == 1.0:
        return CheckResult("omega ratios increasing", True, "alpha=1: constant weights")
    r = t.omega[1:] / t.omega[:-1]
    bad = np.flatnonzero(np.diff(r) <= 0.0)
    return CheckResult(
        "omega ratios increasing",
        bad.size == 0,
        "" if bad.size == 0 else f"fails at n={int(bad[0]) + 1}",
    )


def _inv_decay(t: WeightTable) -> CheckResult:
    if t.alpha == 1.0:
        return CheckResult("omega_inv decay slope", True, "alpha=1: finite sequence")
    s = decay_slope(t.omega_inv, t.n_max // 4, t.n_max)
    target = -(t.alpha + 1.0)
    return CheckResult(
        "omega_inv decay slope", abs(s - target) <= SLOPE_TOL, f"slope={s:.4f}, expected {target:.2f}"
    )


def _beta_decay(t: WeightTable) -> CheckResult:
    beta = t.beta
    nonneg = bool(np.all(beta >= 0.0)) and bool(np.all(np.diff(beta) <= 0.0))
    if t.alpha == 1.0:
        return CheckResult("beta nonnegative, nonincreasing, decay slope", nonneg, "alpha=1")
    # beta[i] holds beta_{i+1}
    padded = np.concatenate([[np.nan], beta])
    s = decay_slope(padded, t.n_max // 4, t.n_max)
    ok = nonneg and abs(s + t.alpha) <= SLOPE_TOL
    return CheckResult(
        "beta nonnegative, nonincreasing, decay slope", ok, f"slope={s:.4f}, expected {-t.alpha:.2f}"
    )


def _unit_convolution(t: WeightTable) -> CheckResult:
    prod = np.convolve(t.omega, t.omega_inv)[: t.n_max + 1]
    prod[0] -= 1.0
    err = float(np.max(np.abs(prod)))
    return CheckResult("omega * omega_inv = unit", err <= 1e-10, f"max deviation {err:.2e}")


def _kaluza(t: WeightTable) -> CheckResult:
    p = PowerSeries(2.0 * gamma_fn(t.alpha + 1.0) * t.omega)
    cert = kaluza_certificate(p)
    ok = cert.holds and (cert.strictly_positive or t.alpha == 1.0) and abs(cert.c0 - 0.5) <= 1e-12
    return CheckResult(
        "Kaluza certificate for 2 Gamma(alpha+1) omega",
        ok,
        f"c0={cert.c0:.15g}, c0 - sum c_s = {cert.tail_deficit:.3e}",
    )


def _disc_bound(t: WeightTable, radius: float = 0.99, samples: int = 4096) -> CheckResult:
    m = disc_min_modulus(PowerSeries(t.omega), radius, samples)
    bound = omega_lower_bound(t.alpha)
    return CheckResult(
        f"|omega| >= 1/(2 Gamma(alpha+1)) on |xi| = {radius}",
        m >= bound,
        f"min={m:.6f}, bound={bound:.6f}",
    )


def _factorization(t: WeightTable) -> CheckResult:
    m = min(t.n_max, 2048)
    omega = PowerSeries(t.omega[: m + 1])
    r = r_series(t.alpha, omega)
    rebuilt = convolve(binomial_series(t.alpha, m), reciprocal(r))
    err = float(np.max(np.abs(rebuilt.coeffs - t.omega_inv[: m + 1])))
    return CheckResult("(1-xi)^alpha / r reproduces omega_inv", err <= 1e-8, f"max deviation {err:.2e}")


CHECKS: tuple[Callable[[WeightTable], CheckResult], ...] = (
    _signs,
    _sum_identity,
    _omega_ratio,
    _inv_decay,
    _beta_decay,
    _unit_convolution,
    _kaluza,
    _disc_bound,
    _factorization,
)


def run_weight_checks(alpha: float, n_max: int) -> list[CheckResult]:
    table = WeightTable.build(alpha, n_max)
    return [check(table) for check in CHECKS]
