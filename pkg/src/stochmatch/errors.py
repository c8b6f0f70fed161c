"""Exception types raised by stochmatch."""


class StochMatchError(Exception):
    """Base class for all library errors."""


class GraphError(StochMatchError, ValueError):
    pass


class DuplicateEdge(GraphError):
    pass


class SelfLoop(GraphError):
    pass


class BadProbability(GraphError):
    pass


class Overflow(GraphError):
    """Total edge weight does not fit in a signed 64-bit integer."""


class NotAMatching(GraphError):
    pass


class TooLarge(StochMatchError, ValueError):
    """Instance exceeds the size limit of an exhaustive routine."""


class NotAugmentable(StochMatchError, ValueError):
    pass


class NotAugmenting(StochMatchError, ValueError):
    pass


class BadEpsilon(StochMatchError, ValueError):
    pass


class CoverageViolation(StochMatchError, ValueError):
    pass


class BadSpec(StochMatchError, ValueError):
    pass


class BadAxis(StochMatchError, ValueError):
    pass


class ConfigError(StochMatchError, ValueError):
    pass


class CertificateFailure(StochMatchError):
    """An exact certificate check failed during an experiment."""

    def __init__(self, message, trial=None, round_index=None):
        super().__init__(message)
        self.trial = trial
        self.round_index = round_index
