"""Exception types for numerical and configuration failures."""


class QoctError(Exception):
    """Base class for package-specific errors."""


class NumericalConsistencyError(QoctError):
    """A computed quantity violates a tolerance that indicates numerical trouble."""


class InvalidStateError(QoctError):
    """A matrix fails the density-matrix (or co-state) invariants."""


class PropagationAccuracyError(QoctError):
    """A propagated snapshot violates its invariants beyond tolerance."""

    def __init__(self, message, step_index=None):
        super().__init__(message)
        self.step_index = step_index


class NonConvergenceError(QoctError):
    """An iterative procedure hit its budget before reaching tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class MonotonicityError(QoctError):
    """The monitored objective increased during a fixed-weight optimization."""

    def __init__(self, message, j_previous=None, j_current=None):
        super().__init__(message)
        self.j_previous = j_previous
        self.j_current = j_current


class DegenerateStateError(QoctError):
    """Forward state too close to maximally mixed for an angle gradient."""


class UndefinedAngleError(QoctError):
    """Bloch angle requested for a maximally mixed state."""


class ConfigError(QoctError):
    """Invalid run configuration; the message carries the offending field path."""
