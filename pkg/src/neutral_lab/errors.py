"""Exception hierarchy shared across the package."""


class NeutralLabError(Exception):
    """Base class for all package errors."""


class ValidationError(NeutralLabError):
    """Malformed or out-of-range input (bad parameters, bad config)."""


class GeometryError(NeutralLabError):
    """Geometric failure: self-intersection, lost univalence, containment violation."""


class NearEvaluationError(NeutralLabError):
    """Target too close to a source curve for the requested quadrature."""

    def __init__(self, message, distance=None, limit=None):
        super().__init__(message)
        self.distance = distance
        self.limit = limit


class SolverError(NeutralLabError):
    """Linear system could not be solved reliably."""

    def __init__(self, message, cond=None):
        super().__init__(message)
        self.cond = cond


class DesignError(NeutralLabError):
    """No valid coating exists for the requested configuration."""


class UnsupportedConfigurationError(NeutralLabError):
    """Input is well-formed but outside what this solver handles."""
