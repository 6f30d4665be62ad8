"""Exception hierarchy shared by every layer of the engine."""


class SoergelKitError(Exception):
    """Base class for all engine errors."""


class ChainConditionViolated(SoergelKitError):
    """A differential does not square to zero."""


class StrandMismatch(SoergelKitError):
    """Operands live on different numbers of strands."""


class IndexOutOfRange(SoergelKitError):
    """A generator index is outside 1..n-1."""


class ShapeMismatch(SoergelKitError):
    """Matrix or bimodule shapes are incompatible for the requested operation."""


class CutoffTooLow(SoergelKitError):
    """The internal-degree cutoff lies below every degree carried by the input."""


class NotFreeBelowCutoff(SoergelKitError):
    """A graded dimension table is not that of a free R-module below the safe window."""


class ParseError(SoergelKitError):
    """A braid word could not be parsed.

    ``position`` is the 1-based index of the offending token.
    """

    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position


class UnknownCheck(SoergelKitError):
    """The requested verification check does not exist."""


class CacheCorrupted(SoergelKitError):
    """A cached complex failed revalidation on load."""
