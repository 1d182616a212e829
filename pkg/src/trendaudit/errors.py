"""Exception hierarchy.

Two families matter to callers: ``DataError`` for malformed or unusable
input files and ``PreconditionError`` for inputs that parse fine but cannot
support the requested statistic.  The CLI maps them to exit codes 3 and 4.
"""


class TrendAuditError(Exception):
    """Base class for all package errors."""


class DataError(TrendAuditError, ValueError):
    pass


class PreconditionError(TrendAuditError, ValueError):
    pass


# -- data errors --

class InvalidSeries(DataError):
    pass


class MissingColumn(DataError):
    pass


class DuplicateTime(DataError):
    def __init__(self, time):
        self.time = time
        super().__init__(f"duplicate time stamp {time}")


class NoRows(DataError):
    pass


class MalformedLine(DataError):
    def __init__(self, lineno, line, reason):
        self.lineno = lineno
        self.line = line
        super().__init__(f"line {lineno}: {reason}: {line!r}")


# -- statistical preconditions --

class TooShort(PreconditionError):
    pass


class LengthMismatch(PreconditionError):
    pass


class EmptyIntersection(PreconditionError):
    pass


class ConstantInput(PreconditionError):
    pass


class ConstantRegressor(ConstantInput):
    pass


class ConstantSeries(ConstantInput):
    pass


class DegenerateTime(PreconditionError):
    pass


class OverlapTooShort(PreconditionError):
    pass


class SampleTooLarge(PreconditionError):
    pass


class NoEligibleYears(PreconditionError):
    pass


class DegenerateRange(UserWarning):
    """Emitted when a histogram is requested over values with zero range."""
