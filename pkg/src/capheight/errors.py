"""Exception types shared across the package."""


class CapheightError(Exception):
    """Base class for all package errors."""


class InvalidSetError(CapheightError):
    """Degenerate or malformed set descriptor."""


class AmbiguousPointError(CapheightError):
    """Query point lies on (or within tolerance of) the boundary."""


class UnsupportedModeError(CapheightError):
    """Operation asked for a closed form that does not exist for this set."""


class DegenerateSampleError(CapheightError):
    """Boundary sample unusable (duplicate points, singular system)."""


class InsufficientCandidatesError(CapheightError):
    """Requested more points than candidates available."""


class LevelUnreachableError(CapheightError):
    """Green level not reached along a ray within the radius cap."""


class UndefinedResultantError(CapheightError):
    """Resultant of the zero polynomial requested."""


class RootConvergenceError(CapheightError):
    """Root finder failed; carries the residual diagnostics."""

    def __init__(self, message, residual_bound=None):
        super().__init__(message)
        self.residual_bound = residual_bound


class CoprimalityError(CapheightError):
    """Polynomials share a factor where coprimality is required."""


class MeasureOverlapError(CapheightError):
    """Two measures share an atom where disjoint supports are required."""


class HypothesisViolationError(CapheightError):
    """A result's hypothesis fails; carries the measured quantity."""

    def __init__(self, message, measured=None):
        super().__init__(message)
        self.measured = measured


class LevelTooLowError(CapheightError):
    """Full level set still below capacity one; names the smallest usable level."""

    def __init__(self, message, min_level=None):
        super().__init__(message)
        self.min_level = min_level


class MonotonicityViolationError(CapheightError):
    """Capacity bisection could not bracket; carries the theta/capacity table."""

    def __init__(self, message, table=None):
        super().__init__(message)
        self.table = table or []
