"""Regularizing solvers for Abel-type first-kind Volterra equations.

Both schemes are forward substitutions on a lower-triangular system; the only
regularization is the choice of the step size relative to the noise level.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import solve_triangular

from .errors import (
    DomainError,
    PreconditionError,
    RateRegimeError,
    SingularError,
    SingularKernelError,
    StartingSystemError,
)
from .operator import Grid, ProblemSpec
from .weights import WeightTable

STARTING_CONDITION_LIMIT = 1e8
DENSE_LIMIT = 4096
DIAGNOSTICS_LIMIT = 1024


@dataclass(frozen=True)
class NoisyRhs:
    """Right-hand side values f_n^delta at x_1..x_N and the noise level delta."""

    values: np.ndarray
    delta: float = 0.0

    def __post_init__(self) -> None:
        v = np.array(self.values, dtype=float).ravel()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        if self.delta < 0.0:
            raise DomainError("noise level must be nonnegative")

    @classmethod
    def exact(cls, problem: ProblemSpec, grid: Grid) -> NoisyRhs:
        return cls(problem.rhs(grid.points[1:]), 0.0)


@dataclass(frozen=True)
class StabilityRecord:
    """Max-norms of ``D_h``, ``(D_h A_h)^-1`` and ``A_h^-1``.

    ``noise_amplification`` is ``h**-alpha * ||A_h^-1||``, the factor that
    multiplies the noise level in the solution error.
    """

    norm_D: float
    norm_DA_inv: float
    norm_A_inv: float
    noise_amplification: float

    def to_dict(self) -> dict:
        return {
            "norm_D": self.norm_D,
            "norm_DA_inv": self.norm_DA_inv,
            "norm_A_inv": self.norm_A_inv,
            "noise_amplification": self.noise_amplification,
        }


@dataclass
class SolveReport:
    u_mid: np.ndarray
    grid: Grid
    used_corrections: bool
    max_error: Optional[float] = None
    max_residual: float = 0.0
    stability: Optional[StabilityRecord] = None
    seed: Optional[int] = None
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "u_mid": self.u_mid.tolist(),
            "midpoints": self.grid.midpoints.tolist(),
            "max_error": self.max_error,
            "max_residual": self.max_residual,
            "stability": None if self.stability is None else self.stability.to_dict(),
            "used_corrections": self.used_corrections,
            "grid": self.grid.to_dict(),
            "seed": self.seed,
            "config": self.config,
        }


def _prepare(problem: ProblemSpec, grid: Grid, rhs: NoisyRhs, weights: Optional[WeightTable]):
    N = grid.N
    if rhs.values.shape != (N,):
        raise ValueError(f"expected {N} right-hand side values, got {rhs.values.size}")
    if weights is None:
        weights = WeightTable.build(problem.alpha, N)
    elif weights.alpha != problem.alpha or weights.n_max < N:
        raise ValueError("weight table does not match alpha or is too short")
    return weights


def _finish(
    problem: ProblemSpec,
    grid: Grid,
    weights: WeightTable,
    u: np.ndarray,
    residual: np.ndarray,
    corrections: bool,
    diagnostics: bool,
) -> SolveReport:
    max_error = None
    if problem.exact_solution is not None:
        exact = np.asarray(problem.exact_solution(grid.midpoints), dtype=float)
        max_error = float(np.max(np.abs(u - exact)))
    stability = None
    if diagnostics:
        A, D = build_matrices(problem, grid, weights)
        stability = stability_diagnostics(A, D, grid.h, problem.alpha)
    return SolveReport(
        u_mid=u,
        grid=grid,
        used_corrections=corrections,
        max_error=max_error,
        max_residual=float(np.max(residual)) if residual.size else 0.0,
        stability=stability,
    )


def solve_plain(
    problem: ProblemSpec,
    grid: Grid,
    rhs: NoisyRhs,
    weights: Optional[WeightTable] = None,
    diagnostics: bool = False,
) -> SolveReport:
    """Product midpoint scheme, solved row by row.

    ``max_residual`` is the largest row residual relative to ``|f_n^delta|``.
    """
    weights = _prepare(problem, grid, rhs, weights)
    N, h, alpha = grid.N, grid.h, problem.alpha
    x, mid = grid.points, grid.midpoints
    omega = weights.omega
    f = rhs.values
    ha = h**alpha

    u = np.zeros(N)
    residual = np.zeros(N)
    for n in range(1, N + 1):
        krow = np.asarray(problem.kernel(x[n], mid[:n]), dtype=float)
        diag = omega[0] * krow[n - 1]
        if diag == 0.0:
            raise SingularKernelError(f"kernel vanishes at (x_{n}, x_{n}-h/2)", index=n)
        s = np.dot(omega[n - 1 : 0 : -1], krow[: n - 1] * u[: n - 1])
        u[n - 1] = (f[n - 1] / ha - s) / diag
        residual[n - 1] = abs(ha * (s + diag * u[n - 1]) - f[n - 1]) / max(abs(f[n - 1]), 1e-300)
    return _finish(problem, grid, weights, u, residual, False, diagnostics)


def _starting_values(
    problem: ProblemSpec, grid: Grid, f: np.ndarray, weights: WeightTable
) -> np.ndarray:
    x, mid = grid.points, grid.midpoints
    omega, w = weights.omega, weights.w_start
    S = np.empty((2, 2))
    for n in (1, 2):
        for j in (1, 2):
            base = omega[n - j] if n >= j else 0.0
            S[n - 1, j - 1] = (base + w[n - 1, j - 1]) * problem.kernel(x[n], mid[j - 1])
    S *= grid.h**problem.alpha
    det = S[0, 0] * S[1, 1] - S[0, 1] * S[1, 0]
    if det == 0.0 or not math.isfinite(det):
        raise StartingSystemError("starting system is singular", condition=math.inf)
    inv = np.array([[S[1, 1], -S[0, 1]], [-S[1, 0], S[0, 0]]]) / det
    cond = np.abs(S).sum(axis=1).max() * np.abs(inv).sum(axis=1).max()
    if cond > STARTING_CONDITION_LIMIT:
        raise StartingSystemError(
            f"starting system is ill-conditioned (condition {cond:.3g})", condition=cond
        )
    return inv @ f[:2]


def solve_modified(
    problem: ProblemSpec,
    grid: Grid,
    rhs: NoisyRhs,
    weights: Optional[WeightTable] = None,
    diagnostics: bool = False,
) -> SolveReport:
    """Corrected scheme: a 2x2 starting solve, then forward substitution from row 3."""
    if grid.N < 2:
        raise PreconditionError("the corrected scheme needs N >= 2")
    weights = _prepare(problem, grid, rhs, weights)
    N, h, alpha = grid.N, grid.h, problem.alpha
    x, mid = grid.points, grid.midpoints
    omega, w = weights.omega, weights.w_start
    f = rhs.values
    ha = h**alpha

    u = np.zeros(N)
    residual = np.zeros(N)
    u[:2] = _starting_values(problem, grid, f, weights)
    for n in range(1, N + 1):
        krow = np.asarray(problem.kernel(x[n], mid[:n]), dtype=float)
        # row 1 reaches x_{3/2} > x_1: the kernel must be defined on the square
        kstart = np.asarray(problem.kernel(x[n], mid[:2]), dtype=float)
        corr = w[n - 1, 0] * kstart[0] * u[0] + w[n - 1, 1] * kstart[1] * u[1]
        s = np.dot(omega[n - 1 : 0 : -1], krow[: n - 1] * u[: n - 1]) + corr
        diag = omega[0] * krow[n - 1]
        if n >= 3:
            if diag == 0.0:
                raise SingularKernelError(f"kernel vanishes at (x_{n}, x_{n}-h/2)", index=n)
            u[n - 1] = (f[n - 1] / ha - s) / diag
        residual[n - 1] = abs(ha * (s + diag * u[n - 1]) - f[n - 1]) / max(abs(f[n - 1]), 1e-300)
    return _finish(problem, grid, weights, u, residual, True, diagnostics)


def solve(problem, grid, rhs, weights=None, corrections=False, diagnostics=False) -> SolveReport:
    method = solve_modified if corrections else solve_plain
    return method(problem, grid, rhs, weights, diagnostics)


# -- stability diagnostics --------------------------------------------------


def build_matrices(
    problem: ProblemSpec, grid: Grid, weights: Optional[WeightTable] = None
) -> tuple[np.ndarray, np.ndarray]:
    """Dense system matrix ``A_h`` and Toeplitz inverse-weight matrix ``D_h``."""
    N = grid.N
    if N > DENSE_LIMIT:
        raise ValueError(f"dense matrices are limited to N <= {DENSE_LIMIT}")
    if weights is None:
        weights = WeightTable.build(problem.alpha, N)
    idx = np.arange(N)
    lag = idx[:, None] - idx[None, :]
    lower = lag >= 0
    lagc = np.where(lower, lag, 0)
    K = np.asarray(problem.kernel(grid.points[1:, None], grid.midpoints[None, :]), dtype=float)
    K = np.broadcast_to(K, (N, N))
    A = np.where(lower, weights.omega[lagc] * K, 0.0)
    D = np.where(lower, weights.omega_inv[lagc], 0.0)
    return A, D


def _inverse_norm(L: np.ndarray) -> float:
    if np.any(np.diag(L) == 0.0):
        raise SingularError("triangular factor has a zero diagonal entry")
    inv = solve_triangular(L, np.eye(L.shape[0]), lower=True)
    return float(np.abs(inv).sum(axis=1).max())


def stability_diagnostics(A: np.ndarray, D: np.ndarray, h: float, alpha: float) -> StabilityRecord:
    if A.shape[0] > DIAGNOSTICS_LIMIT:
        raise ValueError(f"inverse-norm diagnostics are limited to N <= {DIAGNOSTICS_LIMIT}")
    norm_A_inv = _inverse_norm(A)
    return StabilityRecord(
        norm_D=float(np.abs(D).sum(axis=1).max()),
        norm_DA_inv=_inverse_norm(np.tril(D @ A)),
        norm_A_inv=norm_A_inv,
        noise_amplification=h ** (-alpha) * norm_A_inv,
    )


def stability_sweep(
    problem: ProblemSpec, N_list: Sequence[int] = (64, 128, 256, 512, 1024)
) -> list[StabilityRecord]:
    """Diagnostics on successively refined grids."""
    weights = WeightTable.build(problem.alpha, max(N_list))
    records = []
    for N in N_list:
        grid = problem.grid(N)
        A, D = build_matrices(problem, grid, weights)
        records.append(stability_diagnostics(A, D, grid.h, problem.alpha))
    return records


def growth_factors(values: Sequence[float]) -> np.ndarray:
    """Ratios between consecutive entries, e.g. of a norm under grid doubling."""
    v = np.asarray(values, dtype=float)
    return v[1:] / v[:-1]


# -- step-size rules --------------------------------------------------------


class StepRegime(enum.Enum):
    LOW_ORDER = "A"  # h ~ delta**(1/gamma)
    HIGH_ORDER = "B"  # h ~ delta**(1/(gamma - 1 + 2 alpha))
    CLASSICAL = "classical"  # alpha = 1, h ~ delta**(1/(gamma + 1))


MIN_STEPS = 4
MAX_STEPS = 2**20


def step_regime(
    gamma: float, alpha: float, zero_initial_conditions: bool = False, corrections: bool = False
) -> StepRegime:
    """Which step-size rule applies, or ``RateRegimeError`` if none does."""
    if not 0.0 < alpha <= 1.0:
        raise DomainError(f"alpha must lie in (0, 1], got {alpha!r}")
    if not 0.0 < gamma <= 2.0:
        raise RateRegimeError(f"smoothness gamma={gamma} outside (0, 2]")
    if alpha == 1.0:
        return StepRegime.CLASSICAL
    no_start = zero_initial_conditions or corrections
    if alpha <= 0.5 and alpha < gamma <= 1.0 + alpha:
        return StepRegime.LOW_ORDER
    if alpha >= 0.5 and 1.0 - alpha < gamma <= 2.0 - alpha:
        return StepRegime.HIGH_ORDER
    if gamma > 2.0 - alpha:
        if no_start:
            return StepRegime.HIGH_ORDER
        raise RateRegimeError(
            f"gamma={gamma} > 2 - alpha needs u(0) = u'(0) = 0 or correction weights"
        )
    if alpha < 0.5 and 1.0 + alpha < gamma <= 2.0 - alpha:
        raise RateRegimeError(
            f"gamma={gamma} lies in the saturation gap ({1 + alpha:g}, {2 - alpha:g}] "
            f"for alpha={alpha} < 1/2; no rate improvement is available there"
        )
    raise RateRegimeError(
        f"gamma={gamma} is too small for alpha={alpha}: need gamma > {min(alpha, 1 - alpha):g}"
    )


def choose_step_size(
    delta: float,
    gamma: float,
    alpha: float,
    c_scale: float = 1.0,
    zero_initial_conditions: bool = False,
    corrections: bool = False,
    a: float = 1.0,
) -> tuple[int, StepRegime]:
    """Number of subintervals balancing discretization error against noise."""
    if not delta > 0.0:
        raise DomainError("noise level must be positive")
    if not c_scale > 0.0:
        raise DomainError("c_scale must be positive")
    regime = step_regime(gamma, alpha, zero_initial_conditions, corrections)
    if regime is StepRegime.LOW_ORDER:
        exponent = 1.0 / gamma
    else:
        exponent = 1.0 / (gamma - 1.0 + 2.0 * alpha)
    h = c_scale * delta**exponent
    N = int(round(a / h))
    return min(max(N, MIN_STEPS), MAX_STEPS), regime


def step_size(delta: float, gamma: float, alpha: float, regime: StepRegime, c_scale: float = 1.0) -> float:
    """Raw step size of a regime before rounding to a grid."""
    if regime is StepRegime.LOW_ORDER:
        return c_scale * delta ** (1.0 / gamma)
    return c_scale * delta ** (1.0 / (gamma - 1.0 + 2.0 * alpha))
