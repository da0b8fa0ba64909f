"""Product midpoint rule for Abel-type first-kind Volterra equations with noisy data."""

from .errors import (
    AbelMidpointError,
    AccuracyError,
    DomainError,
    ExperimentRowError,
    PreconditionError,
    RateRegimeError,
    SingularError,
    SingularKernelError,
    StartingSystemError,
)
from .harness import (
    EXAMPLES,
    ExperimentConfig,
    ExperimentRow,
    fit_rate,
    inject_noise,
    predicted_order,
    rate_study,
    run_experiment,
    test_problem,
)
from .operator import (
    Grid,
    ProblemSpec,
    abel_monomial_exact,
    midpoint_apply,
    midpoint_apply_modified,
    quadrature_error,
    singular_quadrature_oracle,
)
from .series import (
    KaluzaCertificate,
    PowerSeries,
    binomial_series,
    convolve,
    disc_min_modulus,
    kaluza_certificate,
    r_series,
    reciprocal,
)
from .solver import (
    NoisyRhs,
    SolveReport,
    StabilityRecord,
    StepRegime,
    build_matrices,
    choose_step_size,
    solve,
    solve_modified,
    solve_plain,
    stability_diagnostics,
    stability_sweep,
)
from .weights import (
    WeightTable,
    compute_beta,
    compute_correction_weights,
    compute_omega,
    compute_omega_inv,
    compute_tau,
    gamma_fn,
)

__version__ = "0.1.0"
