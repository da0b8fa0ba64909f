"""Forward operator: exact Abel integrals, the product midpoint rule and its errors."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy.special import roots_jacobi

from .errors import AccuracyError, DomainError, PreconditionError
from .weights import WeightTable, compute_omega, gamma_fn

Kernel = Callable[[np.ndarray, np.ndarray], np.ndarray]
Function = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Grid:
    """Uniform grid on ``[0, a]`` with ``N`` subintervals."""

    a: float
    N: int

    def __post_init__(self) -> None:
        if not self.a > 0.0:
            raise DomainError(f"interval end must be positive, got {self.a!r}")
        if int(self.N) != self.N or self.N < 1:
            raise DomainError(f"N must be a positive integer, got {self.N!r}")

    @property
    def h(self) -> float:
        return self.a / self.N

    @property
    def points(self) -> np.ndarray:
        """Full grid points x_0..x_N."""
        return self.a * np.arange(self.N + 1) / self.N

    @property
    def midpoints(self) -> np.ndarray:
        """Midpoints x_{1/2}..x_{N-1/2}."""
        return self.a * (np.arange(1, self.N + 1) - 0.5) / self.N

    def to_dict(self) -> dict:
        return {"a": self.a, "N": self.N, "h": self.h}


@dataclass(frozen=True)
class ProblemSpec:
    """A first-kind equation ``(1/Gamma(alpha)) int_0^x (x-y)**(alpha-1) k(x,y) u(y) dy = f(x)``.

    ``kernel``, ``rhs`` and ``exact_solution`` must accept numpy arrays.
    ``gamma`` and ``hoelder_L`` describe the smoothness of the solution and
    are not enforced.
    """

    alpha: float
    kernel: Kernel
    rhs: Function
    exact_solution: Optional[Function] = None
    gamma: float = 1.0
    hoelder_L: Optional[float] = None
    a: float = 1.0
    zero_initial_conditions: bool = False

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha <= 1.0:
            raise DomainError(f"alpha must lie in (0, 1], got {self.alpha!r}")
        if not 0.0 < self.gamma <= 2.0:
            raise DomainError(f"Hoelder exponent must lie in (0, 2], got {self.gamma!r}")
        if self.hoelder_L is not None and self.hoelder_L < 0.0:
            raise DomainError("Hoelder constant must be nonnegative")

    def check_diagonal(self, grid: Grid, atol: float = 1e-12) -> None:
        x = grid.points
        dev = np.abs(np.asarray(self.kernel(x, x), dtype=float) - 1.0)
        if np.any(dev > atol):
            i = int(np.argmax(dev))
            raise PreconditionError(f"kernel is not 1 on the diagonal at x={x[i]!r}", index=i)

    def grid(self, N: int) -> Grid:
        return Grid(self.a, N)


def abel_monomial_exact(alpha: float, q: float, x):
    """Abel integral of ``y**q``: ``Gamma(q+1)/Gamma(q+1+alpha) * x**(q+alpha)``."""
    c = math.exp(math.lgamma(q + 1.0) - math.lgamma(q + 1.0 + alpha))
    return c * np.power(x, q + alpha)


def _omega_for(alpha: float, N: int, weights: Optional[WeightTable]) -> np.ndarray:
    if weights is None:
        return compute_omega(alpha, N)
    if weights.alpha != alpha or weights.n_max < N:
        raise ValueError("weight table does not match alpha or is too short")
    return weights.omega


def midpoint_apply(
    alpha: float,
    grid: Grid,
    phi_mid: np.ndarray,
    weights: Optional[WeightTable] = None,
) -> np.ndarray:
    """Product midpoint rule at x_1..x_N from midpoint samples of phi."""
    phi_mid = np.asarray(phi_mid, dtype=float)
    N = grid.N
    if phi_mid.shape != (N,):
        raise ValueError(f"expected {N} midpoint samples, got shape {phi_mid.shape}")
    omega = _omega_for(alpha, N, weights)
    return grid.h**alpha * np.convolve(omega[:N], phi_mid)[:N]


def midpoint_apply_modified(
    alpha: float,
    grid: Grid,
    phi_mid: np.ndarray,
    w_start: Optional[np.ndarray] = None,
    weights: Optional[WeightTable] = None,
) -> np.ndarray:
    """Midpoint rule plus starting corrections at the first two midpoints.

    Exact for polynomials of degree at most one.
    """
    if grid.N < 2:
        raise PreconditionError("the corrected rule needs N >= 2")
    if w_start is None:
        w_start = (weights or WeightTable.build(alpha, grid.N)).w_start
    w_start = np.asarray(w_start, dtype=float)[: grid.N]
    if w_start.shape != (grid.N, 2):
        raise ValueError("w_start must provide a pair for every row")
    plain = midpoint_apply(alpha, grid, phi_mid, weights)
    phi_mid = np.asarray(phi_mid, dtype=float)
    return plain + grid.h**alpha * (w_start[:, 0] * phi_mid[0] + w_start[:, 1] * phi_mid[1])


def quadrature_error(
    alpha: float,
    grid: Grid,
    problem_phi: Function,
    exact_value: Callable[[np.ndarray], np.ndarray],
    modified: bool = False,
    weights: Optional[WeightTable] = None,
) -> np.ndarray:
    """Exact minus discrete value of the Abel integral at x_1..x_N."""
    phi_mid = np.asarray(problem_phi(grid.midpoints), dtype=float)
    if modified:
        approx = midpoint_apply_modified(alpha, grid, phi_mid, weights=weights)
    else:
        approx = midpoint_apply(alpha, grid, phi_mid, weights)
    exact = np.asarray(exact_value(grid.points[1:]), dtype=float)
    return exact - approx


# -- reference quadrature ---------------------------------------------------


@lru_cache(maxsize=64)
def _jacobi_rule(n: int, b: float) -> tuple[np.ndarray, np.ndarray]:
    # weight (1 + t)**b on [-1, 1]
    t, w = roots_jacobi(n, 0.0, b)
    return t, w


@lru_cache(maxsize=64)
def _legendre_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(n)


# Graded panels toward y = 0 resolve endpoint singularities of phi.
_GRADING_LEVELS = 60


def _abel_integral_estimate(alpha: float, phi: Function, x: float, n: int) -> tuple[float, float]:
    """Singularity-free rule near y = x, graded Gauss-Legendre near y = 0.

    Returns the estimate and the same rule applied to ``|phi|``, which sets
    the scale of the attainable accuracy when the integrand cancels.
    """
    half = 0.5 * x
    # int_{x/2}^{x} (x-y)**(alpha-1) phi(y) dy with z = x - y in [0, x/2]
    if alpha < 0.5:
        # z = s**(1/alpha) absorbs the weight; high-order Jacobi nodes lose
        # accuracy as the exponent alpha - 1 approaches -1
        top = half**alpha
        t, w = _legendre_rule(n)
        z = (0.5 * top * (1.0 + t)) ** (1.0 / alpha)
        scale = 0.5 * top / alpha
    else:
        t, w = _jacobi_rule(n, alpha - 1.0)
        z = 0.5 * half * (1.0 + t)
        scale = (0.5 * half) ** alpha
    fz = np.asarray(phi(x - z), dtype=float)
    upper = scale * np.dot(w, fz)
    upper_abs = scale * np.dot(w, np.abs(fz))

    # int_0^{x/2}: panels [half*2**-(k+1), half*2**-k]; the innermost
    # panel of width half*2**-60 is dropped
    t, w = _legendre_rule(n)
    k = np.arange(_GRADING_LEVELS)
    lo = half * 0.5 ** (k + 1)
    width = lo
    y = lo[:, None] + 0.5 * width[:, None] * (1.0 + t[None, :])
    vals = (x - y) ** (alpha - 1.0) * np.asarray(phi(y.ravel()), dtype=float).reshape(y.shape)
    lower = np.sum(0.5 * width * (vals @ w))
    lower_abs = np.sum(0.5 * width * (np.abs(vals) @ w))
    g = gamma_fn(alpha)
    return (upper + lower) / g, (upper_abs + lower_abs) / g


def singular_quadrature_oracle(
    alpha: float,
    phi: Function,
    x: float,
    tol: float = 1e-11,
    max_order: int = 512,
) -> float:
    """Reference value of the Abel integral of ``phi`` at ``x``.

    The order of the rule is doubled from 16 until two successive estimates
    agree to ``tol`` relative to the integral of ``|phi|`` against the same
    weight (absolute below 1e-15). Without cancellation that is a relative
    tolerance on the value itself.
    """
    if x < 0.0:
        raise DomainError("x must be nonnegative")
    if x == 0.0:
        return 0.0
    n = 16
    prev, _ = _abel_integral_estimate(alpha, phi, x, n)
    while n < max_order:
        n *= 2
        cur, size = _abel_integral_estimate(alpha, phi, x, n)
        if abs(cur - prev) <= max(tol * size, 1e-15):
            return float(cur)
        prev = cur
    raise AccuracyError(
        f"reference quadrature did not converge at x={x!r} with order {max_order}",
        estimate=float(prev),
    )
