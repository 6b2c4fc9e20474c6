class PcstarError(Exception):
    """Base class for errors raised by this package."""


class GraphError(PcstarError, ValueError):
    """Malformed graph or out-of-range node."""


class GenericityError(PcstarError):
    """Two distinct directed paths tie for the maximum weight."""

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class InconsistencyError(PcstarError):
    """Oracle answers contradict the premises of an orientation step."""

    def __init__(self, message, cycle=None):
        super().__init__(message)
        self.cycle = cycle


class ResourceError(PcstarError):
    """A requested enumeration exceeds the configured size guard."""


class GenerationError(PcstarError):
    """Random model generation could not satisfy its contract."""
