"""Exception hierarchy. Every error raised on bad input is a ``CoherenceError``."""


class CoherenceError(ValueError):
    """Base class for validation and usage errors."""


class NotSquare(CoherenceError):
    pass


class NotHermitian(CoherenceError):
    pass


class TraceDeviation(CoherenceError):
    pass


class NegativeEigenvalue(CoherenceError):
    pass


class NotNormalized(CoherenceError):
    pass


class NonFinite(CoherenceError):
    pass


class DimensionMismatch(CoherenceError):
    pass


class NonRealExpectation(CoherenceError):
    pass


class ConvergenceFailure(CoherenceError):
    pass


class IncompleteChannel(CoherenceError):
    pass


class IndexOutOfRange(CoherenceError):
    pass


class EqualIndices(CoherenceError):
    pass


class NotABijection(CoherenceError):
    pass


class InvalidN(CoherenceError):
    pass


class DimensionTooLargeForExhaustive(CoherenceError):
    pass


class UnknownMeasure(CoherenceError):
    pass


class UnknownAxiom(CoherenceError):
    pass


class FormatError(CoherenceError):
    """Malformed JSON document."""
