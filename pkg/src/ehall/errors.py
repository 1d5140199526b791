"""Exception types shared across the package."""


class EHallError(Exception):
    """Base class for all errors raised by this package."""


class DivisionByZero(EHallError, ZeroDivisionError):
    pass


class InvalidIndex(EHallError, ValueError):
    pass


class PoleAtPoint(EHallError, ArithmeticError):
    pass


class DegenerateSpecialization(EHallError, ValueError):
    pass


class SamplingExhausted(EHallError, RuntimeError):
    """Too many pole points were drawn while sampling specializations."""


class ZeroSegment(EHallError, ValueError):
    pass


class CollinearPair(EHallError, ValueError):
    pass


class AlreadyConvex(EHallError, ValueError):
    pass


class SegmentOutsideRegion(EHallError, ValueError):
    pass


class EmptyWindow(EHallError, ValueError):
    pass


class NoMinimalPath(EHallError, ValueError):
    pass


class RankBoundExceeded(EHallError, ValueError):
    pass


class DenominatorNotCleared(EHallError, ArithmeticError):
    """A kernel denominator failed to cancel; signals an implementation bug."""


class WindowExhausted(EHallError, ValueError):
    """A degree window was too small to decompose an element; enlarge it."""


class DerivationStuck(EHallError, RuntimeError):
    """A rewriting derivation could not make progress."""


class ExpressionSyntaxError(EHallError, SyntaxError):
    """Parse error with position information."""

    def __init__(self, message, line, column):
        super().__init__(f"{message} (line {line}, column {column})")
        self.message = message
        self.line = line
        self.column = column
