"""Exception hierarchy shared by every logitlab module."""


class LogitLabError(Exception):
    """Base class for all library errors."""


class RangeError(LogitLabError, IndexError):
    """A profile entry or state index lies outside its radix."""


class ShapeError(LogitLabError, ValueError):
    """An array does not match the size implied by the game."""


class BudgetError(LogitLabError):
    """The state space exceeds the configured size cap."""


class HypothesisError(LogitLabError, ValueError):
    """A bound or generator precondition does not hold."""


class GraphError(LogitLabError, ValueError):
    """A social graph is not simple or has out-of-range endpoints."""


class NotPotentialError(LogitLabError):
    """The game admits no exact potential.

    ``witness`` records the violated identity: the player, the two profiles
    that differ only in that player's strategy, and the size of the violation.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotReversibleError(LogitLabError):
    """Detailed balance fails beyond tolerance."""

    def __init__(self, message, violation=None):
        super().__init__(message)
        self.violation = violation


class NumericalError(LogitLabError, ArithmeticError):
    """A linear solve or eigen-decomposition lost too much accuracy."""


class TruncationError(LogitLabError):
    """The mixing-time search hit its step cap.

    ``distance`` is the worst-case distance at the cap.
    """

    def __init__(self, message, cap=None, distance=None):
        super().__init__(message)
        self.cap = cap
        self.distance = distance


class GameFormatError(LogitLabError, ValueError):
    """Base class for interchange-format failures."""


class GameSyntaxError(GameFormatError):
    def __init__(self, message, line=None, column=None, position=None):
        super().__init__(message)
        self.line = line
        self.column = column
        self.position = position


class GameSchemaError(GameFormatError):
    pass


class GameSemanticError(GameFormatError):
    pass


class UnsupportedError(LogitLabError):
    """The requested operation is not available for this object."""
