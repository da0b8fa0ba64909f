"""Grid-independent coefficient sequences of the product midpoint rule.

All sequences depend only on the order ``alpha`` of the Abel operator and on a
truncation length; the step size enters the method only through a factor
``h**alpha``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SingularError

# Below this index the closed-form differences lose at most a few digits.
_STABLE_FROM = 8
# The tau expansion is used from index 2 on, where consecutive odd terms
# shrink by at least 1/25.
_TAU_SERIES_FROM = 2
_TAU_SERIES_TERMS = 20


def gamma_fn(x: float) -> float:
    """Euler's gamma function for positive arguments."""
    x = float(x)
    if not x > 0.0 or not math.isfinite(x):
        raise DomainError(f"gamma_fn requires a positive finite argument, got {x!r}")
    return math.gamma(x)


def _check_order(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha <= 1.0:
        raise DomainError(f"alpha must lie in (0, 1], got {alpha!r}")
    return alpha


def _check_length(n_max: int) -> int:
    if int(n_max) != n_max or n_max < 1:
        raise DomainError(f"n_max must be a positive integer, got {n_max!r}")
    return int(n_max)


def _forward_difference_power(s: np.ndarray, p: float) -> np.ndarray:
    """``(s + 1)**p - s**p`` without cancellation for large ``s``."""
    if p == 1.0:
        return np.ones_like(s)
    out = (s + 1.0) ** p - s**p
    big = s >= _STABLE_FROM
    sb = s[big]
    out[big] = sb**p * np.expm1(p * np.log1p(1.0 / sb))
    return out


def compute_omega(alpha: float, n_max: int) -> np.ndarray:
    """Quadrature weights ``((s+1)**alpha - s**alpha) / Gamma(alpha+1)``, s = 0..n_max."""
    alpha = _check_order(alpha)
    n_max = _check_length(n_max)
    s = np.arange(n_max + 1, dtype=float)
    return _forward_difference_power(s, alpha) / gamma_fn(alpha + 1.0)


def compute_tau(alpha: float, n_max: int) -> np.ndarray:
    """Kernel of the first-order quadrature error, entries 0..n_max.

    ``tau[m]`` is ``(1/Gamma(alpha)) * int_{-1/2}^{1/2} (m + 1/2 - s)**(alpha-1) s ds``.
    Indices 0 and 1 use the closed form; from index 2 on the integrand is
    expanded in powers of ``1/(m + 1/2)``, which avoids the ``m**-2`` relative
    cancellation of the closed form.
    """
    alpha = _check_order(alpha)
    n_max = _check_length(n_max)
    if alpha == 1.0:
        return np.zeros(n_max + 1)

    m = np.arange(n_max + 1, dtype=float)
    g1 = gamma_fn(alpha + 1.0)
    tau = _forward_difference_power(m, alpha + 1.0) / gamma_fn(alpha + 2.0) - (
        (m + 1.0) ** alpha + m**alpha
    ) / (2.0 * g1)

    big = m >= _TAU_SERIES_FROM
    c = m[big] + 0.5
    # coef[k] = (-1)**k * binom(alpha - 1, k)
    coef = np.cumprod([1.0] + [(i + 1.0 - alpha) / (i + 1.0) for i in range(2 * _TAU_SERIES_TERMS)])
    total = np.zeros_like(c)
    for k in range(2 * _TAU_SERIES_TERMS - 1, 0, -2):
        total += coef[k] * c ** (-k) * 0.5 ** (k + 1) / (k + 2)
    tau[big] = (alpha / g1) * c ** (alpha - 1.0) * total
    return tau


def compute_omega_inv(omega: np.ndarray) -> np.ndarray:
    """Coefficients of the reciprocal power series of ``omega``.

    Forward substitution, O(n**2).
    """
    omega = np.asarray(omega, dtype=float)
    if omega.ndim != 1 or omega.size == 0:
        raise ValueError("omega must be a nonempty 1-d array")
    if omega[0] == 0.0:
        raise SingularError("leading coefficient is zero; no reciprocal series exists", index=0)
    n = omega.size
    inv = np.empty(n)
    inv[0] = 1.0 / omega[0]
    for k in range(1, n):
        inv[k] = -inv[0] * np.dot(omega[1 : k + 1], inv[k - 1 :: -1])
    return inv + 0.0  # normalise -0.0


def compute_beta(omega_inv: np.ndarray) -> np.ndarray:
    """Partial sums ``beta[n-1] = sum_{l < n} omega_inv[l]`` for n = 1..len."""
    omega_inv = np.asarray(omega_inv, dtype=float)
    if omega_inv.size == 0:
        raise ValueError("omega_inv must be nonempty")
    return np.cumsum(omega_inv)


def compute_correction_weights(tau: np.ndarray, n_max: int) -> np.ndarray:
    """Starting weights ``(w_{n,1}, w_{n,2})`` for rows n = 1..n_max, shape (n_max, 2)."""
    tau = np.asarray(tau, dtype=float)
    n_max = _check_length(n_max)
    if tau.size < n_max:
        raise ValueError(f"need at least {n_max} tau entries, got {tau.size}")
    w2 = np.cumsum(tau[:n_max])
    return np.column_stack([0.0 - w2, w2])


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class WeightTable:
    """Every coefficient the solvers need for one order ``alpha``.

    ``beta[i]`` holds the partial sum with ``i + 1`` terms and ``w_start[i]``
    the correction pair of row ``i + 1``.
    """

    alpha: float
    n_max: int
    omega: np.ndarray
    omega_inv: np.ndarray
    tau: np.ndarray
    beta: np.ndarray
    w_start: np.ndarray

    @classmethod
    def build(cls, alpha: float, n_max: int) -> WeightTable:
        alpha = _check_order(alpha)
        n_max = _check_length(n_max)
        omega = compute_omega(alpha, n_max)
        omega_inv = compute_omega_inv(omega)
        tau = compute_tau(alpha, n_max)
        return cls(
            alpha=alpha,
            n_max=n_max,
            omega=_frozen(omega),
            omega_inv=_frozen(omega_inv),
            tau=_frozen(tau),
            beta=_frozen(compute_beta(omega_inv)),
            w_start=_frozen(compute_correction_weights(tau, n_max)),
        )

    def covers(self, n: int) -> bool:
        return n <= self.n_max

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "n_max": self.n_max,
            "omega": self.omega.tolist(),
            "omega_inv": self.omega_inv.tolist(),
            "tau": self.tau.tolist(),
            "beta": self.beta.tolist(),
            "w_start": self.w_start.tolist(),
        }
