"""Exception types shared across the package."""


class FranklForgeError(Exception):
    """Base class for all package errors."""


class ElementAbsent(FranklForgeError, ValueError):
    """The requested element does not occur in any set of the family."""


class FamilyTooSmall(FranklForgeError, ValueError):
    """The family has fewer than two sets."""


class GroundSetTooLarge(FranklForgeError, ValueError):
    """Exhaustive enumeration was requested above the ground-set cap."""


class NotClosed(FranklForgeError, ValueError):
    """The family is neither union-closed nor intersection-closed."""


class FamilyParseError(FranklForgeError, ValueError):
    """A family file could not be parsed."""


class ExponentOutOfRange(FranklForgeError, ValueError):
    """A symbol exponent is outside the alphabet for its coordinate."""


class BudgetExceeded(FranklForgeError):
    """An explicit enumeration would exceed the configured size budget."""

    def __init__(self, size: int, budget: int, what: str = "lifted family"):
        self.size = size
        self.budget = budget
        self.what = what
        super().__init__(f"{what} has {size} elements, budget is {budget}")


class SetAbsent(FranklForgeError, ValueError):
    """The requested set is not a member of the base family."""


class ZeroProbabilityPrefix(FranklForgeError, ValueError):
    """Conditioning on a prefix that never occurs."""


class LevelEqualityError(FranklForgeError, AssertionError):
    """Conditional probabilities of the nilpotent (or root-of-unity) levels differ."""


class DomainError(FranklForgeError, ValueError):
    """Argument outside the domain of a scalar function or measure constructor."""


class MinimizerClassViolation(FranklForgeError, AssertionError):
    """An interior two-point measure undercut the boundary measure classes."""
