"""Exception hierarchy. CLI exit codes key off the two top-level families."""


class NormSketchError(Exception):
    pass


class InputError(NormSketchError, ValueError):
    """Bad user input: shapes, parameters, malformed files."""


class DimensionError(InputError):
    pass


class NumericalError(NormSketchError, ArithmeticError):
    """A numerical stage could not produce a trustworthy result."""


class RankDeficientError(NumericalError):
    def __init__(self, column, message=None):
        self.column = column
        super().__init__(message or f"matrix is rank deficient at column {column}")
