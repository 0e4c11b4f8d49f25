"""Adic integers of a mixed-radix odometer."""

from pydantic import BaseModel, ConfigDict, model_validator

from .symbolic import Point, SeqSpace


class AdicInt(BaseModel):
    """x = Σ x_i p_{i-1} with eventually periodic digits"""

    model_config = ConfigDict(frozen=True)

    space: SeqSpace
    value: Point = Point.zero()

    @model_validator(mode="after")
    def _digits_in_bounds(self) -> "AdicInt":
        self.space.validate_point(self.value)
        return self

    @classmethod
    def zero(cls, space: SeqSpace) -> "AdicInt":
        return cls(space=space)

    @classmethod
    def one(cls, space: SeqSpace) -> "AdicInt":
        return cls(space=space, value=Point.unit(0))

    @classmethod
    def from_int(cls, space: SeqSpace, n: int) -> "AdicInt":
        """Mixed-radix expansion of a non-negative integer"""
        if n < 0:
            raise ValueError("Use negation for negative integers")
        digits = []
        t = 0
        while n:
            n, digit = divmod(n, space.size(t))
            digits.append(digit)
            t += 1
        return cls(space=space, value=Point.from_word(digits))

    def digits(self, n: int):
        return self.value.prefix(n)

    def __str__(self) -> str:
        return f"{self.value.text(dotted=self.space.dotted)}@{self.space.describe()}"


class Translation(BaseModel):
    """T_b : x ↦ x + b"""

    model_config = ConfigDict(frozen=True)

    b: AdicInt

    @property
    def space(self) -> SeqSpace:
        return self.b.space
