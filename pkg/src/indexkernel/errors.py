"""Exception hierarchy shared by every module.

Two families matter to callers: ``DomainError`` (bad input, the caller's
fault) and ``NumericalError`` (the algorithm could not certify a result).
The command line maps them to exit codes 2 and 3.
"""

from __future__ import annotations

from typing import Any


class IndexKernelError(Exception):
    """Base class for all package errors."""


class DomainError(IndexKernelError, ValueError):
    """An argument lies outside the documented domain of an operation."""


class PoleError(DomainError):
    """A Gamma-type factor is evaluated at one of its poles."""


class NumericalError(IndexKernelError, ArithmeticError):
    """A computation failed to reach its accuracy target.

    Parameters
    ----------
    message : str
        Human readable description.
    diagnostics : dict, optional
        Whatever partial information the failing routine had (last two
        quadrature levels, partial sums, and so on).
    """

    def __init__(self, message: str, diagnostics: dict[str, Any] | None = None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class OverflowSignal(NumericalError, OverflowError):
    """The result exceeds the binary64 range."""


class ConvergenceError(NumericalError):
    """Quadrature or series did not converge within its budget."""


class DecayViolationError(NumericalError):
    """Tail samples of a line integrand do not decay as the model promised."""


class RouteDisagreementError(NumericalError):
    """Two independent representations of the same kernel disagree."""
