"""Exception types raised across the package."""


class GradeCodeError(Exception):
    """Base class for all package errors."""


class InvalidParams(GradeCodeError, ValueError):
    pass


class ParityMismatch(InvalidParams):
    """Real BCH construction requires n and s of different parity."""


class DuplicateNode(GradeCodeError, ValueError):
    pass


class SingularTriangular(GradeCodeError, ArithmeticError):
    pass


class SingularVandermonde(GradeCodeError, ArithmeticError):
    pass


class WrongSetSize(GradeCodeError, ValueError):
    pass


class EmptySet(GradeCodeError, ValueError):
    pass


class GenerationFailure(GradeCodeError, RuntimeError):
    pass


class Disconnected(GradeCodeError, ValueError):
    pass


class CapExceeded(GradeCodeError, ValueError):
    pass


class TooFewExamples(GradeCodeError, ValueError):
    pass


class DimensionMismatch(GradeCodeError, ValueError):
    pass


class MissingPart(GradeCodeError, KeyError):
    pass
