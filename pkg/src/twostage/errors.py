"""Exception hierarchy shared by every module in the package."""


class QueueModelError(ValueError):
    """Base class for all parameter and evaluation errors."""


class NonPositiveRate(QueueModelError):
    pass


class InvalidCapacity(QueueModelError):
    pass


class InfiniteFirstStageWithSecond(QueueModelError):
    pass


class CapacityNotFinite(QueueModelError):
    pass


class NonPositiveArgument(QueueModelError):
    pass


class ThetaMismatch(QueueModelError):
    pass


class NotHeavyTraffic(QueueModelError):
    pass


class TooLarge(QueueModelError):
    pass


class InvalidHorizon(QueueModelError):
    pass


class ZeroReplications(QueueModelError):
    pass


class OracleMismatch(RuntimeError):
    """The two internal stationary solvers disagree beyond tolerance."""
