"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class AbelMidpointError(Exception):
    """Base class for errors raised by this package."""


class DomainError(AbelMidpointError, ValueError):
    """An argument lies outside the domain of a function."""


class SingularError(AbelMidpointError, ArithmeticError):
    """A division by a zero leading coefficient or diagonal entry was requested."""

    def __init__(self, message: str, index: int | None = None) -> None:
        super().__init__(message)
        self.index = index


class SingularKernelError(SingularError):
    """The kernel vanishes on a diagonal entry of the triangular system."""


class StartingSystemError(SingularError):
    """The 2x2 system for the first two midpoint values is singular or ill-conditioned."""

    def __init__(self, message: str, condition: float) -> None:
        super().__init__(message)
        self.condition = condition


class PreconditionError(AbelMidpointError, ValueError):
    """An input violates a documented precondition."""

    def __init__(self, message: str, index: int | None = None) -> None:
        super().__init__(message)
        self.index = index


class RateRegimeError(AbelMidpointError, ValueError):
    """No step-size rule applies to the given smoothness/order combination."""


class AccuracyError(AbelMidpointError, RuntimeError):
    """An adaptive procedure did not reach its tolerance."""

    def __init__(self, message: str, estimate: float) -> None:
        super().__init__(message)
        self.estimate = estimate


class ExperimentRowError(AbelMidpointError):
    """A solve inside an experiment table failed; carries the row context."""

    def __init__(self, message: str, index: int, N: int) -> None:
        super().__init__(message)
        self.index = index
        self.N = N
