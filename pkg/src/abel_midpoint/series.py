"""Truncated formal power series with real coefficients.

The generating function of the quadrature weights factors as
``omega(xi) = (1 - xi)**(-alpha) * r(xi)``; this module provides the
arithmetic to build that factorization on a finite truncation and to check
the sign structure and disc bound that make the inverse weights decay.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .weights import compute_omega_inv, gamma_fn


@dataclass(frozen=True)
class PowerSeries:
    """Coefficients ``c_0..c_M`` of a series truncated after degree ``M``."""

    coeffs: np.ndarray

    def __post_init__(self) -> None:
        c = np.array(self.coeffs, dtype=float).ravel()
        if c.size == 0:
            raise ValueError("a power series needs at least one coefficient")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def truncation(self) -> int:
        return self.coeffs.size - 1

    def __len__(self) -> int:
        return self.coeffs.size

    def __getitem__(self, n):
        return self.coeffs[n]

    def __mul__(self, other: PowerSeries) -> PowerSeries:
        return convolve(self, other)

    def __add__(self, other: PowerSeries) -> PowerSeries:
        m = min(self.truncation, other.truncation) + 1
        return PowerSeries(self.coeffs[:m] + other.coeffs[:m])

    def scale(self, factor: float) -> PowerSeries:
        return PowerSeries(factor * self.coeffs)

    def truncate(self, m: int) -> PowerSeries:
        return PowerSeries(self.coeffs[: m + 1])

    @classmethod
    def unit(cls, m: int) -> PowerSeries:
        c = np.zeros(m + 1)
        c[0] = 1.0
        return cls(c)


def _as_series(a) -> PowerSeries:
    return a if isinstance(a, PowerSeries) else PowerSeries(a)


def convolve(a: PowerSeries, b: PowerSeries) -> PowerSeries:
    """Cauchy product, truncated to the shorter of the two inputs."""
    a, b = _as_series(a), _as_series(b)
    m = min(a.truncation, b.truncation) + 1
    return PowerSeries(np.convolve(a.coeffs[:m], b.coeffs[:m])[:m])


def reciprocal(a: PowerSeries) -> PowerSeries:
    """Reciprocal series; raises ``SingularError`` if the constant term is zero."""
    a = _as_series(a)
    return PowerSeries(compute_omega_inv(a.coeffs))


def binomial_series(beta: float, m: int) -> PowerSeries:
    """Coefficients ``(-1)**n * binom(beta, n)`` of ``(1 - xi)**beta``, n = 0..m."""
    if m < 0:
        raise ValueError("truncation must be nonnegative")
    n = np.arange(1, m + 1, dtype=float)
    factors = (n - 1.0 - beta) / n
    return PowerSeries(np.concatenate([[1.0], np.cumprod(factors)]))


def r_series(alpha: float, omega: np.ndarray) -> PowerSeries:
    """``r(xi) = (1 - xi)**alpha * omega(xi)`` on the truncation of ``omega``."""
    omega = _as_series(omega)
    return convolve(binomial_series(alpha, omega.truncation), omega)


@dataclass(frozen=True)
class KaluzaCertificate:
    """Sign structure of ``1/p = c0 - sum_{s>=1} c[s-1] xi**s``.

    ``bound_ok`` records ``sum_{j<=s} c_j <= c0 * p_s / p_{s-1}`` for every
    ``s`` in the truncation.
    """

    c0: float
    c: np.ndarray
    partial_sums: np.ndarray
    nonnegative: bool
    strictly_positive: bool
    bound_ok: bool

    @property
    def holds(self) -> bool:
        return self.c0 > 0.0 and self.nonnegative and self.bound_ok

    @property
    def tail_deficit(self) -> float:
        """``c0 - sum c_s``; tends to zero as the truncation grows."""
        return float(self.c0 - self.partial_sums[-1]) if self.partial_sums.size else float(self.c0)


def kaluza_certificate(p: PowerSeries, rtol: float = 1e-12) -> KaluzaCertificate:
    """Check log-convexity of ``p`` and certify the signs of its reciprocal.

    Raises ``PreconditionError`` if a coefficient is nonpositive or the ratio
    ``p[s+1]/p[s]`` drops below ``p[s]/p[s-1]`` by more than ``rtol``
    (relative); ``error.index`` is the index of the first coefficient that
    breaks the condition.
    """
    p = _as_series(p)
    c = p.coeffs
    bad = np.flatnonzero(c <= 0.0)
    if bad.size:
        i = int(bad[0])
        raise PreconditionError(f"coefficient p[{i}] = {c[i]!r} is not positive", index=i)
    if c.size >= 3:
        ratios = c[1:] / c[:-1]
        drops = np.flatnonzero(ratios[1:] < ratios[:-1] * (1.0 - rtol))
        if drops.size:
            s = int(drops[0]) + 1
            raise PreconditionError(
                f"ratio condition fails: p[{s + 1}]/p[{s}] = {ratios[s]:.6g} "
                f"< p[{s}]/p[{s - 1}] = {ratios[s - 1]:.6g}",
                index=s + 1,
            )

    inv = reciprocal(p).coeffs
    c0 = float(inv[0])
    cs = -inv[1:]
    partial = np.cumsum(cs)
    scale = max(abs(c0), 1.0)
    nonneg = bool(np.all(cs >= -rtol * scale))
    strictly = bool(np.all(cs > 0.0))
    bound = c0 * c[1:] / c[:-1]
    bound_ok = bool(np.all(partial <= bound + rtol * scale))
    cs.setflags(write=False)
    partial.setflags(write=False)
    return KaluzaCertificate(c0, cs, partial, nonneg, strictly, bound_ok)


def disc_min_modulus(a: PowerSeries, radius: float = 0.99, samples: int = 4096) -> float:
    """Minimum of ``|a(radius * exp(i theta))|`` over equispaced angles.

    The polynomial is sampled with one FFT after folding its scaled
    coefficients modulo ``samples``.
    """
    a = _as_series(a)
    if not 0.0 < radius < 1.0:
        raise ValueError(f"radius must lie in (0, 1), got {radius!r}")
    if samples < 1:
        raise ValueError("samples must be positive")
    n = np.arange(a.coeffs.size)
    scaled = a.coeffs * np.exp(n * np.log(radius))
    folded = np.zeros(samples)
    np.add.at(folded, n % samples, scaled)
    values = np.fft.ifft(folded) * samples
    return float(np.min(np.abs(values)))


def omega_lower_bound(alpha: float) -> float:
    """Lower bound ``1/(2 Gamma(alpha+1))`` of ``|omega(xi)|`` on the open unit disc."""
    return 1.0 / (2.0 * gamma_fn(alpha + 1.0))
