"""Exception and warning types shared by every module."""


class CalcError(Exception):
    """Base class for all errors raised by multicalc."""


class ParseError(CalcError, ValueError):
    """Malformed expression text.

    Attributes
    ----------
    position : int
        Zero-based character offset where parsing failed.
    """

    def __init__(self, message, position=None, text=None):
        self.position = position
        self.text = text
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class UnboundVariableError(CalcError, LookupError):
    """A variable has no value in the evaluation binding."""


class DomainError(CalcError, ArithmeticError):
    """A mathematically undefined operation, e.g. division by zero."""


class ShapeError(CalcError, ValueError):
    """Tensor extents or index names are inconsistent."""


class SingularMatrixError(DomainError):
    pass


class FastPathUnavailable(CalcError):
    """The matrix-product Einstein scheme does not apply to the operands."""


class DomainWarning(RuntimeWarning):
    """Evaluation produced NaN or infinity from a domain error."""
