"""Exception types shared across the package."""


class UmemuraError(Exception):
    """Base class for all errors raised by this package."""


class NotDivisible(UmemuraError, ArithmeticError):
    """Exact division left a nonzero remainder."""


class UnsupportedDivisor(UmemuraError, ArithmeticError):
    """The divisor's leading t-coefficient depends on r."""


class ParseError(UmemuraError, ValueError):
    """Malformed polynomial document.

    ``pos`` is a character offset into the text when the JSON itself is
    broken, otherwise the index of the offending term (``path`` says which).
    """

    def __init__(self, message, pos=None, path=None):
        self.pos = pos
        self.path = path
        where = []
        if pos is not None:
            where.append(f"pos {pos}")
        if path:
            where.append(path)
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class InsufficientEntries(UmemuraError, ValueError):
    pass


class DegenerateDenominator(UmemuraError, ArithmeticError):
    pass


class PoleAtSample(UmemuraError, ArithmeticError):
    pass


class SingularPoint(UmemuraError, ValueError):
    pass


class StepUnderflow(UmemuraError, RuntimeError):
    pass


class ZeroY1(UmemuraError, ZeroDivisionError):
    pass


class InvalidB(UmemuraError, ValueError):
    pass


class IntegerB(UmemuraError, ValueError):
    pass


class OutsideDisk(UmemuraError, ValueError):
    pass


class IrregularPoint(UmemuraError, ValueError):
    pass


class VersionMismatch(UmemuraError):
    pass


class CorruptCache(UmemuraError):
    pass


class ResonantSeries(UmemuraError, ValueError):
    """A Frobenius-type recurrence hits a zero leading factor (logarithmic case)."""
