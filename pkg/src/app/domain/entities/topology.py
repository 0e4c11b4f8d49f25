"""Neighborhood specifications and distance reports."""

from fractions import Fraction
from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator, model_validator

from ..models.value_objects import Interval, fraction_text
from .cylmap import CylMap
from .measures import MeasureSpec
from .symbolic import CylinderUnion

NbhdVariant = Literal["U", "U'", "Vbar", "W", "Wbar", "D"]


class NbhdSpec(BaseModel):
    """A basic neighborhood of ``center``.

    U bounds μ(E(S,T)), U' bounds sup_F μ(SF Δ TF), Vbar bounds
    sup_F |μ(SF) − μ(TF)|, W asks SF = TF, Wbar bounds the forward and
    inverse symmetric differences, D bounds the uniform adic distance.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    variant: NbhdVariant
    center: CylMap
    measures: Tuple[MeasureSpec, ...] = ()
    sets: Tuple[CylinderUnion, ...] = ()
    eps: Optional[Fraction] = None
    restricted: bool = Field(default=False, description="Nonatomic measures and single cylinders only")

    @field_validator("eps", mode="before")
    @classmethod
    def _eps_fraction(cls, v):
        return None if v is None else Fraction(v)

    @model_validator(mode="after")
    def _parameters_fit_variant(self) -> "NbhdSpec":
        if self.variant != "W" and (self.eps is None or self.eps <= 0):
            raise ValueError(f"Neighborhood {self.variant} needs ε > 0")
        if self.variant in ("U", "U'", "Vbar", "Wbar") and not self.measures:
            raise ValueError(f"Neighborhood {self.variant} needs at least one measure")
        if self.variant in ("W", "Wbar") and not self.sets:
            raise ValueError(f"Neighborhood {self.variant} needs at least one set")
        for mu in self.measures:
            self.center.space.ensure_same(mu.space)
        for F in self.sets:
            self.center.space.ensure_same(F.space)
        if self.restricted:
            if any(mu.has_atoms for mu in self.measures):
                raise ValueError("Restricted neighborhoods take nonatomic measures only")
            if any(len(F.words) != 1 or F.points for F in self.sets):
                raise ValueError("Restricted neighborhoods take single cylinders only")
        return self


class SymdiffBound(BaseModel):
    """Search lower bound and analytic upper bound for sup_F μ(TF Δ SF)"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    lower: Fraction
    upper: Fraction
    witness: CylinderUnion
    exhaustive: bool
    active: int = Field(description="Cells on which the two maps move differently")

    @field_serializer("lower", "upper")
    def _bound_text(self, value: Fraction) -> str:
        return fraction_text(value)

    @field_serializer("witness")
    def _witness_text(self, witness: CylinderUnion) -> str:
        return str(witness)


class DistanceRow(BaseModel):
    """All distances of one pair under one measure"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    measure: int
    uniform: Interval
    symdiff: SymdiffBound
    abs_diff: Fraction
    metric: Interval

    @field_serializer("abs_diff")
    def _abs_text(self, value: Fraction) -> str:
        return fraction_text(value)

    def cells(self) -> List[str]:
        return [
            str(self.measure),
            str(self.uniform),
            fraction_text(self.symdiff.lower),
            fraction_text(self.symdiff.upper),
            fraction_text(self.abs_diff),
            str(self.metric),
        ]


class SeparationReport(BaseModel):
    """A pair close in the set-difference topology but far in the uniform one"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    T: CylMap
    S: CylMap
    measure: MeasureSpec
    depth: int
    abs_diff: Fraction
    uniform: Interval

    @field_serializer("abs_diff")
    def _abs_text(self, value: Fraction) -> str:
        return fraction_text(value)

    @property
    def separates(self) -> bool:
        return self.abs_diff == 0 and self.uniform.lo > 0
