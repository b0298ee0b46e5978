"""Exception hierarchy shared by all modules."""


class WishartError(Exception):
    """Base class for library errors."""


class InputDomainError(WishartError, ValueError):
    """Input data violates a precondition (non-finite entries, bad shape, empty batch)."""


class DomainError(WishartError, ValueError):
    """A function was evaluated at an excluded point."""


class BoundaryValueError(DomainError):
    """Point lies on a branch cut and no boundary side was requested."""


class PoleError(DomainError):
    """Evaluation hit a pole of the function."""


class RangeError(DomainError):
    """Argument outside the supported numerical range (overflow/underflow)."""


class StepSizeError(WishartError, RuntimeError):
    """SDE step rejected after the maximum number of halvings."""


class AccuracyError(WishartError, ArithmeticError):
    """An adaptive scheme failed to reach its tolerance."""


class UnsupportedError(WishartError, ValueError):
    """Requested size is outside what the routine supports."""
