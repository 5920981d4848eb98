"""Exception types raised across the package."""


class FragileError(Exception):
    """Base class for every error raised by this package."""


class EmptyInput(FragileError, ValueError):
    pass


class OutOfRange(FragileError, IndexError):
    pass


class IdenticalIds(FragileError, ValueError):
    pass


class MalformedNetwork(FragileError, ValueError):
    pass


class WidthMismatch(FragileError, ValueError):
    pass


class NotPowerOfTwo(FragileError, ValueError):
    pass


class TooWide(FragileError, ValueError):
    pass


class OddWidth(FragileError, ValueError):
    pass


class NotSelectionNetwork(FragileError, ValueError):
    pass


class RankOutOfRange(FragileError, ValueError):
    pass


class UnsortedInput(FragileError, ValueError):
    pass


class MultipleSinks(FragileError):
    pass


class InconsistentClaim(FragileError):
    pass


class UnsupportedAccessPattern(FragileError):
    pass


class InvalidConfig(FragileError, ValueError):
    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class InsufficientData(FragileError, ValueError):
    pass


class IoFailure(FragileError, OSError):
    pass
