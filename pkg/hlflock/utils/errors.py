class FlockError(Exception):
    """Base class for every error raised by hlflock."""


class ConfigError(FlockError):
    """The run configuration is invalid or unreadable."""


class OutputError(FlockError):
    """Results could not be written."""


class InvariantBreach(FlockError, AssertionError):
    """A pathwise invariant of the dynamics was violated. Always a bug."""

    def __init__(self, message, step=None):
        super().__init__(message if step is None else f"step {step}: {message}")
        self.message = message
        self.step = step

    def __reduce__(self):
        return (self.__class__, (self.message, self.step))


class DimensionError(FlockError, ValueError):
    """Shapes, step tags or the timestep are inconsistent with the flock."""


class BoundInapplicable(FlockError):
    """A bound formula is undefined for the requested parameters."""


class DegenerateBound(BoundInapplicable):
    """The critical bound was requested for a bird with w0 = 0."""

    def __init__(self, bird):
        super().__init__(
            f"bound not available for bird {bird}: w0 = 0 (degenerate case, "
            "a leader shares the bird's initial velocity)"
        )
        self.bird = bird

    def __reduce__(self):
        return (self.__class__, (self.bird,))


class ReplicaError(FlockError):
    """An error raised while simulating one ensemble replica."""

    def __init__(self, replica, cause):
        super().__init__(f"replica {replica}: {cause}")
        self.replica = replica
        self.cause = cause

    def __reduce__(self):
        return (self.__class__, (self.replica, self.cause))
