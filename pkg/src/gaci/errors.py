"""Exception hierarchy.

Two families map onto the CLI exit codes: :class:`SchemaError` (bad input
files, exit 2) and :class:`NumericError` (degenerate data or models, exit 3).
"""


class GaciError(Exception):
    """Base class for every error raised by the package."""


class SchemaError(GaciError):
    pass


class NumericError(GaciError):
    pass


# -- schema ---------------------------------------------------------------

class EmptyFile(SchemaError):
    pass


class MissingColumn(SchemaError):
    def __init__(self, column, path=None):
        self.column = column
        where = f" in {path}" if path else ""
        super().__init__(f"missing column {column!r}{where}")


class NonNumericCell(SchemaError):
    def __init__(self, row, column, value, path=None):
        self.row = row
        self.column = column
        self.value = value
        where = f" in {path}" if path else ""
        super().__init__(
            f"non-numeric value {value!r} at row {row}, column {column!r}{where}")


class DuplicateCountry(SchemaError):
    def __init__(self, country):
        self.country = country
        super().__init__(f"duplicate country {country!r}")


class DuplicateObservation(SchemaError):
    def __init__(self, country, year):
        self.country = country
        self.year = year
        super().__init__(f"duplicate observation ({country!r}, {year})")


class YearOutOfRange(SchemaError):
    pass


class InvalidValue(SchemaError):
    """A parsed value violates a domain invariant (range, sign)."""


class UnknownCountry(SchemaError):
    pass


# -- numeric --------------------------------------------------------------

class DegenerateRange(NumericError):
    def __init__(self, what="values"):
        self.what = what
        super().__init__(f"DegenerateRange: {what} have max == min")


class DegenerateVariance(NumericError):
    pass


class LengthMismatch(NumericError):
    pass


class RankDeficient(NumericError):
    def __init__(self, column):
        self.column = column
        super().__init__(f"RankDeficient: design column {column!r} is collinear")


class TooFewObservations(NumericError):
    pass


class SingularMoment(NumericError):
    pass


class ZeroStandardError(NumericError):
    pass


class UnknownBaseCountry(NumericError):
    pass


class ZeroInput(NumericError):
    pass


class NonPositiveValue(NumericError):
    pass


class ZeroWorldGdp(NumericError):
    pass


class MissingPillar(NumericError):
    pass


class EmptyIntersection(NumericError):
    pass
