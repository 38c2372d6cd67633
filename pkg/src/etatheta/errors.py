"""Exception types shared across the package."""


class EtaThetaError(Exception):
    """Base class for all package errors."""


class NonUnitError(EtaThetaError, ValueError):
    """Raised when inverting a series whose leading coefficient is not a nonzero scalar."""


class OffsetMismatchError(EtaThetaError, ValueError):
    """Raised when two q-series cannot be aligned on a common integer grid."""


class NotConvergedError(EtaThetaError, ArithmeticError):
    """Raised when a numerical procedure misses its tolerance."""


class InsufficientSupportError(EtaThetaError, ValueError):
    """Raised when a zeta-bound is too small for the requested coefficient table."""


class InsufficientTruncationError(NotConvergedError):
    """Raised when a truncated series is evaluated too close to |q| = 1."""


class OutOfRangeError(EtaThetaError, IndexError):
    """Raised on a coefficient query outside the stored lattice."""


class PoleDetectionError(EtaThetaError, ArithmeticError):
    """Raised when the continuous extension at z = 1/2 disagrees with nearby samples."""


class BesselOverflowError(EtaThetaError, OverflowError):
    """Raised when an unscaled Bessel value does not fit in a double."""
