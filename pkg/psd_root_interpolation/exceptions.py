"""Exceptions raised by psd_root_interpolation."""

from numpy.linalg import LinAlgError


class PsdRootInterpolationError(Exception):
    """Base class of all errors raised by this package."""


class NonConvergenceError(PsdRootInterpolationError, LinAlgError):
    """An iterative solver exhausted its sweep budget."""


class SingularInputError(PsdRootInterpolationError, LinAlgError):
    """A numerically singular matrix was passed where an invertible one is needed."""


class DomainViolationError(PsdRootInterpolationError, ValueError):
    """A matrix function was applied outside of its domain."""


class NotPSDError(PsdRootInterpolationError, ValueError):
    """A matrix is not positive semidefinite within tolerance."""


class HypothesisViolatedError(PsdRootInterpolationError, ValueError):
    """The hypothesis of a checked lemma does not hold for the given inputs."""


class LengthMismatchError(PsdRootInterpolationError, ValueError):
    """Two vectors that need to be compared have different lengths."""


class NegativeEntryError(PsdRootInterpolationError, ValueError):
    """A vector passed to log-majorisation has a negative entry."""


class InvalidOrderError(PsdRootInterpolationError, ValueError):
    """The order of a compound matrix is out of range."""


class ParseError(PsdRootInterpolationError, ValueError):
    """A tensor file could not be parsed."""


class ValidationError(PsdRootInterpolationError, ValueError):
    """Parsed input is inconsistent (counts, shapes, finiteness, PSD-ness)."""
