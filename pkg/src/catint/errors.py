"""Exception hierarchy shared by every module."""


class CatIntError(Exception):
    """Base class for all library errors."""


class OrderUnavailable(CatIntError):
    """Raised when an ordered operation is requested on the complex backend."""


class DimensionMismatch(CatIntError):
    pass


class InvalidP(CatIntError):
    pass


class InfiniteDimensional(CatIntError):
    pass


class MalformedRelation(CatIntError):
    pass


class MalformedQuiver(CatIntError):
    pass


class InvalidAlgebra(CatIntError):
    pass


class OutOfDomain(CatIntError):
    pass


class IndexOutOfRange(CatIntError):
    pass


class InvalidMeasure(CatIntError):
    pass


class ZeroTotalMeasure(InvalidMeasure):
    pass


class LevelOverflow(CatIntError):
    pass


class LevelZero(CatIntError):
    pass


class MixedLevels(CatIntError):
    pass


class BackendMismatch(CatIntError):
    pass


class MixedBackends(BackendMismatch):
    pass


class InvalidWeight(CatIntError):
    pass


class TargetInvalid(CatIntError):
    pass


class UnsupportedConfiguration(CatIntError):
    pass


class EvaluationFailure(CatIntError):
    """Wraps an exception raised by a user-supplied function during sampling."""


class ParseError(CatIntError):
    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at column {position})"
        super().__init__(message)
