"""Exception hierarchy shared by every module; the CLI maps these to exit codes."""


class LacSphereError(Exception):
    exit_code = 1


class DomainError(LacSphereError, ValueError):
    """An argument lies outside the operation's domain."""

    exit_code = 2


class BudgetError(LacSphereError):
    """Requested computation exceeds the configured work/memory budget."""

    exit_code = 3


class NumericalIntegrityError(LacSphereError, ArithmeticError):
    """A floating-point result failed its integrity check."""

    exit_code = 4


class PrecisionError(NumericalIntegrityError):
    """A truncation or quadrature error bound is too large relative to the value."""
