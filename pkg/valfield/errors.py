"""Exception hierarchy shared by the library and the command line."""


class ValuedFieldError(Exception):
    """Base class for every error raised by valfield"""


class ValidationError(ValuedFieldError, ValueError):
    """Input is well formed but violates a precondition"""


class ParseError(ValuedFieldError, ValueError):
    """Input text or JSON could not be read"""


class FieldMismatchError(ValidationError):
    """Operands live over different field descriptors"""


class InvalidFieldError(ValidationError):
    """Field descriptor is malformed, e.g. p is not prime"""


class DivisionByZeroError(ValuedFieldError, ZeroDivisionError):
    """Division by the zero scalar"""


class DimensionMismatchError(ValidationError):
    """Shapes of matrices, vectors or maps do not fit together"""


class NonSquareError(DimensionMismatchError):
    """A square matrix was required"""


class SingularMatrixError(ValuedFieldError, ArithmeticError):
    """Inverse requested for a singular matrix"""


class ZeroPolynomialError(ValidationError):
    """Operation undefined on the zero polynomial"""


class EmptyPolyhedronError(ValuedFieldError):
    """Operation requires a nonempty polyhedron"""


class InconsistentEqualitiesError(ValuedFieldError):
    """The linear equality system has no solution"""


class InvalidBoundsError(ValidationError):
    """Annulus bounds must satisfy 1 <= a <= b"""


class SizeTooLargeError(ValidationError):
    """Input exceeds the size cap of a brute-force oracle"""


class OracleMismatchError(ValuedFieldError):
    """A brute-force oracle disagrees with the library result"""
