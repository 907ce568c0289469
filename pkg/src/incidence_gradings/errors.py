"""Exception hierarchy shared by every module of the package."""


class GradingError(Exception):
    """Base class for all library errors."""


class DivisionByZero(GradingError, ZeroDivisionError):
    pass


class ConductorOverflow(GradingError):
    pass


class InsufficientRoots(GradingError):
    pass


class AmbientMismatch(GradingError):
    pass


class NotASubgroup(GradingError):
    pass


class CycleDetected(GradingError):
    pass


class IndexOutOfRange(GradingError):
    pass


class SearchBudgetExceeded(GradingError):
    pass


class PosetMismatch(GradingError):
    pass


class NotInvertible(GradingError):
    pass


class NotIdempotent(GradingError):
    pass


class NotOrthogonal(GradingError):
    pass


class BadSpectrum(GradingError):
    pass


class NotRadicalGraded(GradingError):
    pass


class NotDivisionBlock(GradingError):
    """Raised when a diagonal block fails to be a graded division algebra.

    For a valid grading the blocks are always group algebras, so this
    signals an upstream bug or an invalid input grading.
    """


class NotAPartialOrder(GradingError):
    pass


class LinkMismatch(GradingError):
    pass


class NonAbelianGroup(GradingError):
    pass


class DistinctnessViolated(GradingError):
    pass


class TagTooLarge(GradingError):
    pass


class DuplicateCharacter(GradingError):
    pass


class ParseError(GradingError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)
