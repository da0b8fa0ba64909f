"""Test-problem family, noise injection, experiment tables and rate fitting."""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .errors import AbelMidpointError, DomainError, ExperimentRowError
from .operator import Grid, ProblemSpec
from .solver import NoisyRhs, SolveReport, solve
from .weights import WeightTable, gamma_fn

THREADS_ENV = "ABEL_MIDPOINT_THREADS"
TABLE_N = (32, 64, 128, 256, 512, 1024, 2048)
RATE_N = (64, 128, 256, 512, 1024, 2048)
CSV_COLUMNS = ("N", "delta", "delta_rel_percent", "max_error", "ratio")


def test_problem(alpha: float, q: float) -> ProblemSpec:
    """Smooth-kernel problem on [0, 1] with exact solution ``y**q / Gamma(q+1)``."""
    if not 0.0 < alpha <= 1.0:
        raise DomainError(f"alpha must lie in (0, 1], got {alpha!r}")
    if not 0.0 < q <= 2.0:
        raise DomainError(f"q must lie in (0, 2], got {q!r}")
    c = 1.0 / gamma_fn(q + 2.0 + alpha)
    gq = gamma_fn(q + 1.0)

    def kernel(x, y):
        x = np.asarray(x, dtype=float)
        return (1.0 + x * y) / (1.0 + x * x)

    def rhs(x):
        x = np.asarray(x, dtype=float)
        return c * x ** (q + alpha) * (q + 1.0 + alpha + (q + 1.0) * x * x) / (1.0 + x * x)

    def exact(y):
        return np.asarray(y, dtype=float) ** q / gq

    return ProblemSpec(
        alpha=alpha,
        kernel=kernel,
        rhs=rhs,
        exact_solution=exact,
        gamma=q,
        a=1.0,
        zero_initial_conditions=q > 1.0,
    )


test_problem.__test__ = False  # not a pytest test


def inject_noise(exact_values: np.ndarray, delta: float, seed: int) -> NoisyRhs:
    """Add i.i.d. uniform perturbations on [-delta, delta) drawn from numpy's PCG64."""
    if delta < 0.0:
        raise DomainError("noise level must be nonnegative")
    exact_values = np.asarray(exact_values, dtype=float)
    if delta == 0.0:
        return NoisyRhs(exact_values.copy(), 0.0)
    rng = np.random.default_rng(seed)
    return NoisyRhs(exact_values + rng.uniform(-delta, delta, exact_values.shape), delta)


@dataclass(frozen=True)
class Example:
    alpha: float
    q: float
    use_corrections: bool
    noise_p: float


# p is the exact-data rate the theory predicts for each configuration
EXAMPLES = {
    "1": Example(0.5, 2.0, False, 1.5),
    "2": Example(0.9, 0.4, False, 0.3),
    "3": Example(0.2, 0.5, False, 0.3),
    "4": Example(0.5, 1.0, False, 1.0),
    "4c": Example(0.5, 1.0, True, 1.5),
}


@dataclass
class ExperimentConfig:
    alpha: float
    q: float
    use_corrections: bool = False
    N_list: list = field(default_factory=lambda: list(TABLE_N))
    noise_c: float = 0.3
    noise_p: float = 1.0
    seed: int = 0
    output_path: Optional[str] = None

    @classmethod
    def from_example(cls, key: str, **overrides) -> ExperimentConfig:
        try:
            ex = EXAMPLES[str(key)]
        except KeyError:
            raise DomainError(f"unknown example {key!r}; choose from {sorted(EXAMPLES)}") from None
        params = dict(alpha=ex.alpha, q=ex.q, use_corrections=ex.use_corrections, noise_p=ex.noise_p)
        params.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**params)

    @classmethod
    def from_dict(cls, data: dict) -> ExperimentConfig:
        data = dict(data)
        if "n_list" in data:
            data["N_list"] = data.pop("n_list")
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise DomainError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls(**data)
        cfg.N_list = [int(n) for n in cfg.N_list]
        return cfg

    @property
    def ratio_exponent(self) -> float:
        return self.noise_p / (self.noise_p + self.alpha)

    def noise_level(self, h: float) -> float:
        return self.noise_c * h ** (self.noise_p + self.alpha)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ExperimentRow:
    N: int
    delta: float
    delta_rel_percent: float
    max_error: float
    ratio: float

    @property
    def h(self) -> float:
        return 1.0 / self.N


def _threads() -> Optional[int]:
    value = os.environ.get(THREADS_ENV)
    if not value:
        return None
    n = int(value)
    if n < 1:
        raise DomainError(f"{THREADS_ENV} must be a positive integer")
    return n


def _run_row(
    config: ExperimentConfig, problem: ProblemSpec, weights: WeightTable, index: int, N: int
) -> ExperimentRow:
    grid = problem.grid(N)
    delta = config.noise_level(grid.h)
    exact = problem.rhs(grid.points[1:])
    rhs = inject_noise(exact, delta, config.seed + index)
    try:
        report = solve(problem, grid, rhs, weights, corrections=config.use_corrections)
    except AbelMidpointError as exc:
        raise ExperimentRowError(f"row {index} (N={N}): {exc}", index, N) from exc
    f_norm = float(np.max(np.abs(problem.rhs(grid.points))))
    err = report.max_error
    ratio = err / delta**config.ratio_exponent if delta > 0.0 else math.inf
    return ExperimentRow(N, delta, 100.0 * delta / f_norm, err, ratio)


def run_experiment(config: ExperimentConfig) -> list[ExperimentRow]:
    """One table: a noisy solve per grid size, row seed = base seed + row index."""
    problem = test_problem(config.alpha, config.q)
    weights = WeightTable.build(config.alpha, max(config.N_list))
    jobs = list(enumerate(config.N_list))
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        rows = list(pool.map(lambda job: _run_row(config, problem, weights, *job), jobs))
    return sorted(rows, key=lambda r: r.N)


def noise_free_errors(
    alpha: float, q: float, use_corrections: bool, N_list: Sequence[int] = RATE_N
) -> list[tuple[float, float]]:
    """``(h, max_error)`` pairs for exact data."""
    problem = test_problem(alpha, q)
    weights = WeightTable.build(alpha, max(N_list))
    out = []
    for N in N_list:
        grid = problem.grid(N)
        report = solve(problem, grid, NoisyRhs.exact(problem, grid), weights, use_corrections)
        out.append((grid.h, report.max_error))
    return out


def predicted_order(alpha: float, q: float, use_corrections: bool) -> float:
    """Exact-data order the convergence theorems give for ``u = y**q``.

    Integer ``q`` gives a smooth solution, so the largest admissible
    smoothness is used; ``u(0) = u'(0) = 0`` holds exactly when ``q > 1``.
    """
    gamma = 2.0 if float(q).is_integer() else min(q, 2.0)
    if gamma <= min(alpha, 1.0 - alpha):
        raise DomainError(f"no predicted order for alpha={alpha}, q={q}")
    if gamma > 2.0 - alpha and (use_corrections or q > 1.0):
        return gamma - 1.0 + alpha
    if alpha <= 0.5:
        return min(gamma, 1.0 + alpha) - alpha
    return min(gamma, 2.0 - alpha) - 1.0 + alpha


Point = Union[ExperimentRow, tuple]


def fit_rate(points: Iterable[Point], drop_coarsest: int = 2) -> float:
    """Least-squares slope of log(error) against log(h), coarsest grids dropped."""
    pairs = []
    for p in points:
        if isinstance(p, ExperimentRow):
            pairs.append((p.h, p.max_error))
        else:
            h, e = p
            pairs.append((float(h), float(e)))
    if len(pairs) < 4:
        raise DomainError(f"need at least 4 points to fit a rate, got {len(pairs)}")
    pairs.sort(key=lambda he: -he[0])
    h, e = np.array(pairs[drop_coarsest:]).T
    slope, _ = np.polyfit(np.log(h), np.log(e), 1)
    return float(slope)


def rate_study(key: str, N_list: Sequence[int] = RATE_N) -> dict:
    ex = EXAMPLES[key]
    pairs = noise_free_errors(ex.alpha, ex.q, ex.use_corrections, N_list)
    return {
        "example": key,
        "alpha": ex.alpha,
        "q": ex.q,
        "use_corrections": ex.use_corrections,
        "predicted": predicted_order(ex.alpha, ex.q, ex.use_corrections),
        "fitted": fit_rate(pairs),
        "errors": [{"h": h, "max_error": e} for h, e in pairs],
    }


# -- serialization ----------------------------------------------------------


def _fmt(x) -> str:
    return str(x) if isinstance(x, (int, np.integer)) else format(float(x), ".17g")


def rows_to_csv(rows: Sequence[ExperimentRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        writer.writerow([_fmt(getattr(r, c)) for c in CSV_COLUMNS])
    return buf.getvalue()


def report_to_json(report: SolveReport) -> str:
    return json.dumps(report.to_dict(), indent=2) + "\n"


def solve_from_config(data: dict) -> SolveReport:
    """Single noisy solve of the test problem described by a JSON config.

    Keys: ``alpha``, ``q`` and either ``N`` or ``delta`` (then the grid is
    chosen from the noise level). Optional: ``noise_c``/``noise_p`` to set
    ``delta`` from ``N``, ``seed``, ``use_corrections``, ``c_scale``,
    ``diagnostics``.
    """
    from .solver import choose_step_size

    alpha, q = float(data["alpha"]), float(data["q"])
    corrections = bool(data.get("use_corrections", False))
    seed = int(data.get("seed", 0))
    problem = test_problem(alpha, q)
    delta = data.get("delta")
    if "N" in data:
        N = int(data["N"])
        if delta is None and "noise_p" in data:
            delta = float(data.get("noise_c", 0.3)) * (1.0 / N) ** (float(data["noise_p"]) + alpha)
    elif delta is not None:
        N, _ = choose_step_size(
            float(delta),
            q,
            alpha,
            c_scale=float(data.get("c_scale", 1.0)),
            zero_initial_conditions=problem.zero_initial_conditions,
            corrections=corrections,
        )
    else:
        raise DomainError("config needs 'N' or 'delta'")
    delta = float(delta or 0.0)
    grid = problem.grid(N)
    rhs = inject_noise(problem.rhs(grid.points[1:]), delta, seed)
    report = solve(
        problem, grid, rhs, corrections=corrections, diagnostics=bool(data.get("diagnostics", False))
    )
    report.seed = seed
    report.config = {**data, "N": N, "delta": delta}
    return report
