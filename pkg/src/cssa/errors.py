"""Exception hierarchy shared across the package."""


class CSSAError(Exception):
    """Base class for every domain error raised by cssa."""


class SeedError(CSSAError, ValueError):
    pass


class EmptySeed(SeedError):
    pass


class IllegalDigit(SeedError):
    pass


class MissingClassMap(SeedError):
    pass


class AllDontCare(SeedError):
    pass


class PositionOutOfRange(CSSAError, IndexError):
    pass


class IndexOutOfRange(CSSAError, IndexError):
    pass


class LengthMismatch(CSSAError, ValueError):
    pass


class LabelOutOfRange(CSSAError, ValueError):
    pass


class UnknownLabel(CSSAError, ValueError):
    pass


class SelectOverflow(CSSAError, IndexError):
    pass


class IncompleteCover(CSSAError, ValueError):
    pass


class NotIncreasing(CSSAError, ValueError):
    pass


class ReferenceMismatch(CSSAError, ValueError):
    pass


class TextMismatch(CSSAError, ValueError):
    pass


class DanglingReference(CSSAError, KeyError):
    pass


class IncompleteCosts(CSSAError, ValueError):
    pass


class NonMonotoneMatching(CSSAError, ValueError):
    pass


class OrderMismatch(CSSAError, ValueError):
    pass


class UnknownEntry(CSSAError, KeyError):
    pass


class FormatError(CSSAError, ValueError):
    """Raised when a serialized blob is malformed or has the wrong magic."""
