"""Exception types shared across the package."""


class DualuniError(ValueError):
    """Base class for all package errors."""


class InvalidDimensionError(DualuniError):
    """A dimension argument is out of range (e.g. d = 0, q < 2)."""


class ShapeMismatchError(DualuniError):
    """Array shapes are inconsistent with the requested operation."""


class HermiticityError(DualuniError):
    """Matrix is not Hermitian within the caller's tolerance."""


class SingularMatrixError(DualuniError):
    """Matrix is singular where an invertible one is required."""


class ValidationError(DualuniError):
    """An input object fails its defining algebraic certificate."""


class DegenerateStateError(DualuniError):
    """State preparation produced an (exactly) zero-norm vector."""


class CapExceededError(DualuniError):
    """A requested dense object exceeds the configured size cap."""


class BudgetExceededError(RuntimeError):
    """Estimated memory for an experiment exceeds the configured budget."""
