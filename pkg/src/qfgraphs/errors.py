"""Exception hierarchy shared by all qfgraphs modules."""


class QFGraphError(Exception):
    """Base class for every error raised by this package."""


class ParseError(QFGraphError, ValueError):
    pass


# --- fields -----------------------------------------------------------------

class NotPrime(QFGraphError, ValueError):
    pass


class ReducibleModulus(QFGraphError, ValueError):
    pass


class DegreeMismatch(QFGraphError, ValueError):
    pass


class FieldMismatch(QFGraphError, TypeError):
    pass


class DivisionByZero(QFGraphError, ZeroDivisionError):
    pass


class NoNonSquare(QFGraphError, ValueError):
    pass


class WrongCharacteristic(QFGraphError, ValueError):
    pass


# --- forms ------------------------------------------------------------------

class DegenerateForm(QFGraphError, ValueError):
    pass


class DimensionMismatch(QFGraphError, ValueError):
    pass


class IsotropicSplitVector(QFGraphError, ValueError):
    pass


class DegenerateRestriction(QFGraphError, ValueError):
    pass


class AnisotropicForm(QFGraphError, ValueError):
    pass


class DimensionNotTwo(DimensionMismatch):
    pass


class DimensionNotThree(DimensionMismatch):
    pass


class OneNotRepresented(QFGraphError, ValueError):
    pass


# --- graphs / predictors ----------------------------------------------------

class CapExceeded(QFGraphError, MemoryError):
    """An enumeration would touch more vectors than the configured cap allows."""

    def __init__(self, needed, cap):
        super().__init__(f"{needed} vertices exceed the cap of {cap}")
        self.needed = needed
        self.cap = cap


class NotApplicable(QFGraphError, ValueError):
    pass


class NoRouteApplicable(QFGraphError, ValueError):
    pass


class OddDimCharTwo(QFGraphError, ValueError):
    pass
