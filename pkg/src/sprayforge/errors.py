"""Exception hierarchy shared by all sprayforge modules."""

from __future__ import annotations


class SprayforgeError(Exception):
    """Base class for every error raised by this package."""


class PolyParseError(SprayforgeError, ValueError):
    """Malformed polynomial text. ``position`` is a 0-based character offset."""

    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        super().__init__(f"{message} (at position {position})")


class UnknownVariableError(PolyParseError):
    """A variable name is not part of the ring (or its index is out of range)."""


class ResourceBudgetError(SprayforgeError):
    """A Groebner computation exceeded its step budget. Never a wrong answer."""


class NotDivisibleError(SprayforgeError, ArithmeticError):
    pass


class NotInIdealError(SprayforgeError):
    pass


class InvalidCenterError(SprayforgeError, ValueError):
    pass


class UnreducedCenterError(InvalidCenterError):
    """Center generators share a nontrivial common factor."""


class ChartIndexError(SprayforgeError, ValueError):
    pass


class TangentDirectionError(SprayforgeError, ValueError):
    """The direction lies in T_aA, so it does not represent a point of E."""


class WrongChartError(SprayforgeError, ValueError):
    """The point is not in the requested chart; ``suggested`` is a chart that works."""

    def __init__(self, message: str, suggested: int):
        self.suggested = suggested
        super().__init__(f"{message}; try chart index {suggested}")


class LiftUndefinedError(SprayforgeError):
    pass


class ProjectionError(SprayforgeError):
    """No proper linear projection found (or a given one is not proper)."""


class DenseImageError(SprayforgeError):
    """An elimination ideal is zero, so no nonzero vanishing polynomial exists."""


class ConstructionError(SprayforgeError):
    """An internal consistency check failed: a bug, not bad input."""


class RetryExhaustedError(SprayforgeError):
    """Every seeded attempt failed. ``attempts`` lists (seed label, reason) pairs."""

    def __init__(self, message: str, attempts: list | None = None):
        self.attempts = list(attempts or [])
        super().__init__(message)


class UnsupportedCenterError(SprayforgeError):
    pass


class EmbeddingError(SprayforgeError):
    pass


class GluingError(SprayforgeError):
    """Pieces of a glued map disagree where they meet."""


class PrincipalityError(SprayforgeError):
    pass


class DominabilityError(SprayforgeError):
    pass


class SceneError(SprayforgeError, ValueError):
    """Invalid scene file. ``pointer`` is a JSON pointer to the offending value."""

    def __init__(self, message: str, pointer: str = ""):
        self.pointer = pointer
        super().__init__(f"{pointer or '/'}: {message}")
