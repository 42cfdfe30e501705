"""
Exception hierarchy for the dynamics-at-infinity toolkit.

Every domain error derives from ValueError as well, so callers that only
know the builtin can still catch them.
"""

from typing import Optional, Sequence


class InfinityDynamicsError(ValueError):
    """Base class for all toolkit errors."""


class ParseError(InfinityDynamicsError):
    """Malformed literal, file or command-line argument."""


class MixedFieldError(InfinityDynamicsError):
    """Arithmetic between quadratic numbers living in different fields."""


class DegenerateMatrixError(InfinityDynamicsError):
    """Zero determinant where an invertible matrix is required."""


class NotPerronError(InfinityDynamicsError):
    """The number is not a weak Perron number."""

    def __init__(self, message: str, conjugate=None):
        super().__init__(message)
        self.conjugate = conjugate


class InvalidCenterError(InfinityDynamicsError):
    """Blow-up center not valid for the current configuration."""


class ContractionError(InfinityDynamicsError):
    """Castelnuovo contraction refused."""


class DegenerateFormError(InfinityDynamicsError):
    """Intersection form on the boundary is degenerate."""

    def __init__(self, message: str, kernel: Optional[Sequence] = None):
        super().__init__(message)
        self.kernel = list(kernel) if kernel is not None else None


class NormalizationError(InfinityDynamicsError):
    """Weights violate the requested normalization."""


class GapViolatedError(InfinityDynamicsError):
    """The spectral gap lambda_1^2 > lambda_2 does not hold."""


class InconsistentEigenDataError(InfinityDynamicsError):
    """Eigen data contradicts a structural constraint."""


class NotAChainError(InfinityDynamicsError):
    """A chain was expected (fork or cycle given)."""


class NoLoxodromicPieceError(InfinityDynamicsError):
    """No loxodromic piece with interior fixed points was found."""


class TermCapExceeded(InfinityDynamicsError):
    """Symbolic iteration exceeded the configured term cap."""


class UnknownDivisorError(InfinityDynamicsError):
    """Divisor name not present on the completion."""


class NotStandardizableError(InfinityDynamicsError):
    """Chain whose intersection form cannot be that of a standard zigzag."""
