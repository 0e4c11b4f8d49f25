"""Domain value objects - Immutable objects that represent values"""

from enum import Enum
from fractions import Fraction
from typing import Tuple

from pydantic import BaseModel, ConfigDict, Field, field_serializer, model_validator

# Digit words are plain tuples, least-significant digit first
Word = Tuple[int, ...]


def fraction_text(value: Fraction) -> str:
    """Render an exact rational the way reports print it."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_fraction(text: str) -> Fraction:
    """Parse '3/10', '0.3' or '1' into an exact rational."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as e:
        raise ValueError(f"Not a rational number: {text!r}") from e


class Verdict(str, Enum):
    """Three-valued answer of a decision procedure"""

    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


class ClauseStatus(str, Enum):
    """Outcome of one checked clause"""

    PASS = "pass"
    FAIL = "fail"
    UNKNOWN = "unknown"


class CellClass(str, Enum):
    """Classification of a cylinder with respect to a difference set"""

    EQUAL = "definitely-equal"
    DIFFERENT = "definitely-different"
    UNRESOLVED = "unresolved"


class Budgets(BaseModel):
    """Enumeration and search budgets shared by the services"""

    model_config = ConfigDict(frozen=True)

    rule_budget: int = Field(default=1 << 16, gt=0, description="Maximal rule count of a table")
    search_cap: int = Field(default=20, gt=0, description="Cells searched exhaustively")
    orbit_horizon: int = Field(default=1 << 16, gt=0, description="Return-time search horizon")
    depth_budget: int = Field(default=256, gt=0, description="Levels scanned for lazy tails")


class Interval(BaseModel):
    """Closed rational interval [lo, hi]"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    lo: Fraction
    hi: Fraction

    @model_validator(mode="after")
    def bounds_must_be_ordered(self) -> "Interval":
        if self.lo > self.hi:
            raise ValueError(f"Interval lower bound {self.lo} exceeds upper bound {self.hi}")
        return self

    @classmethod
    def exact(cls, value: Fraction) -> "Interval":
        return cls(lo=Fraction(value), hi=Fraction(value))

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    def contains(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    @field_serializer("lo", "hi")
    def _serialize_bound(self, value: Fraction) -> str:
        return fraction_text(value)

    def __str__(self) -> str:
        if self.is_exact:
            return fraction_text(self.lo)
        return f"[{fraction_text(self.lo)}, {fraction_text(self.hi)}]"
