"""Exception hierarchy.

Every error carries an ``exit_code`` and a short ``tag`` so the command line
front end can map it to a process status and a machine-parseable prefix.
"""


class GsscmError(Exception):
    exit_code = 2
    tag = "error"


class DataError(GsscmError, ValueError):
    """Input data violates a precondition (shape, size, content)."""

    exit_code = 2
    tag = "data"


class EmptyInputError(DataError):
    tag = "empty-input"


class DimensionExceedsSampleError(DataError):
    tag = "dimension-exceeds-sample"


class SampleTooSmallError(DataError):
    tag = "sample-too-small"


class DegenerateColumnError(DataError):
    tag = "degenerate-column"


class NumericError(GsscmError, ArithmeticError):
    """A numerical procedure failed or produced an unusable result."""

    exit_code = 3
    tag = "numeric"


class ConvergenceError(NumericError):
    tag = "convergence"

    def __init__(self, message, last_iterate=None, iterations=None):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.iterations = iterations


class DegenerateScatterError(NumericError):
    tag = "degenerate-scatter"


class SingularScatterError(NumericError):
    tag = "singular-scatter"


class InvalidMatrixError(NumericError):
    tag = "invalid-matrix"


class NotPositiveDefiniteError(NumericError):
    tag = "not-positive-definite"


class SingularIFError(NumericError):
    tag = "singular-if"
