"""Exception types shared across the package."""


class VirasoroError(Exception):
    """Base class for all package errors."""


class DomainError(VirasoroError, ValueError):
    """A numeric argument lies outside the radius where truncated series are trusted."""


class PoleError(VirasoroError, ZeroDivisionError):
    """Evaluation requested exactly at a pole."""


class LimitError(VirasoroError, ValueError):
    """An enumeration size exceeds the configured cap."""


class DegenerateConfiguration(VirasoroError, ValueError):
    """Two insertion points coincide (or a point sits at a forbidden location)."""


class NotInvertible(VirasoroError, ArithmeticError):
    """Series division by a divisor whose leading coefficient cannot be inverted."""
