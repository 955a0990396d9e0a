"""Exception types shared across the package."""


class ConstraintViolation(ValueError):
    """A structural precondition was violated (bad port counts, interior I/O, ...)."""


class InvalidEpochError(ValueError):
    """Flows in one routing epoch overlap on input or output ports."""


class CapabilityError(ValueError):
    """A flow requires reduce/distribute support a switch stage does not have."""


class ConfigError(ValueError):
    """A scenario or topology configuration is invalid."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message if field is None else f"{field}: {message}")
        self.field = field


class SimulationError(RuntimeError):
    """The simulation cannot proceed (for example an unroutable epoch)."""
