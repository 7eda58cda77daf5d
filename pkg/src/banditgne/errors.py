"""Exception hierarchy shared by every module of the package."""


class BanditGNEError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(BanditGNEError, ValueError):
    pass


class LengthMismatch(BanditGNEError, ValueError):
    pass


class EmptyGraph(BanditGNEError, ValueError):
    pass


class DisconnectedGraph(BanditGNEError, ValueError):
    pass


class NonStochastic(BanditGNEError, ValueError):
    """Explicit weight matrix is not symmetric doubly stochastic."""


class StepNotConverged(BanditGNEError, RuntimeError):
    pass


class InfeasibleAnchor(BanditGNEError, ValueError):
    """Mirror-step anchor lies outside the shrunk strategy set."""


class InvalidExponents(BanditGNEError, ValueError):
    pass


class NotStronglyMonotone(BanditGNEError, ValueError):
    pass


class MissingGradients(BanditGNEError, ValueError):
    pass


class NoConvergence(BanditGNEError, RuntimeError):
    pass


class BufferUnderflow(BanditGNEError, IndexError):
    """Delayed step requested before the feedback of round t - tau exists."""


class InvariantViolation(BanditGNEError, AssertionError):
    """A runtime bound that holds under the standing assumptions failed."""


class ConfigError(BanditGNEError, ValueError):
    pass
