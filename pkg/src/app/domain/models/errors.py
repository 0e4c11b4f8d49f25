"""Domain errors raised by the construction services and codecs."""

from typing import Any, Optional


class BorelDeskError(ValueError):
    """Base class for every domain error"""


class SpaceMismatchError(BorelDeskError):
    """Operands live on different sequence spaces"""


class DigitBoundsError(BorelDeskError):
    """A digit is outside its alphabet"""


class BijectivityError(BorelDeskError):
    """A rule table does not describe a bijection"""


class DepthOverflowError(BorelDeskError):
    """A composed or refined table exceeds the rule budget"""


class BudgetExceededError(BorelDeskError):
    """A lazy enumeration or search ran out of its declared budget"""


class OverlapError(BorelDeskError):
    """Cylinders of a set are not pairwise disjoint"""


class UnresolvedError(BorelDeskError):
    """A value cannot be determined within the budgets"""


class LevelOutOfRangeError(BorelDeskError):
    """A diagram level outside the materialized truncation was requested"""


class VertexNotFoundError(BorelDeskError):
    """A vertex index does not exist on its level"""


class IndexOutOfRangeError(BorelDeskError):
    """A path rank outside [0, h) was requested"""


class NonMonotoneCutsError(BorelDeskError):
    """Telescoping cuts are not strictly increasing from 0"""


class DuplicateWeightError(BorelDeskError):
    """Atomic weights are not pairwise distinct"""


class HorizonExhaustedError(BorelDeskError):
    """Return times exceed the orbit horizon"""


class StageBudgetError(BorelDeskError):
    """No cutting and stacking stage within budget meets the tolerance"""


class RokhlinInfeasibleError(BorelDeskError):
    """No marker level within the truncation meets the tolerance"""

    def __init__(self, message: str, best: Optional[Any] = None):
        super().__init__(message)
        self.best = best


class FormatError(BorelDeskError):
    """Text input that cannot become a domain object"""

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column
        self.detail = message
        self.source: Optional[str] = None

    def diagnostic(self) -> str:
        """``file:line:column: message``"""
        where = f"{self.line}:{self.column}"
        return f"{self.source}:{where}: {self.detail}" if self.source else f"{where}: {self.detail}"


class FormatSyntaxError(FormatError):
    """Malformed text input"""


class FormatSemanticError(FormatError):
    """Well-formed text describing an invalid object"""


class PeriodicityError(BorelDeskError):
    """A construction needing an aperiodic map met periodic cylinders"""


class NestingError(BorelDeskError):
    """Marker sets are not nested"""
