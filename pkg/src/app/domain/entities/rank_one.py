"""Cutting and stacking specifications, rank-one systems and their measures."""

from fractions import Fraction
from typing import Annotated, ClassVar, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator, model_validator

from ..models.value_objects import fraction_text
from .bratteli import Diagram
from .cylmap import CylMap
from .paths import LazyPath


class Stage(BaseModel):
    """Cut the tower into ``cuts`` columns and put ``spacers[k]`` spacers on column k"""

    model_config = ConfigDict(frozen=True)

    cuts: int = Field(ge=1)
    spacers: Tuple[int, ...]

    @model_validator(mode="after")
    def _one_count_per_column(self) -> "Stage":
        if len(self.spacers) != self.cuts:
            raise ValueError(f"Stage with {self.cuts} cuts lists {len(self.spacers)} spacer counts")
        if any(s < 0 for s in self.spacers):
            raise ValueError("Spacer counts must be non-negative")
        return self

    @property
    def spacer_total(self) -> int:
        return sum(self.spacers)

    def text(self, n: int) -> str:
        return f"stage {n} cuts {self.cuts} spacers " + " ".join(str(s) for s in self.spacers)


class CuttingStackingSpec(BaseModel):
    """Stages 1, 2, …; with ``repeat = r`` the stages r, …, last recur forever"""

    model_config = ConfigDict(frozen=True)

    stages: Tuple[Stage, ...]
    repeat: Optional[int] = Field(default=None, description="1-based first stage of the recurring block")

    @model_validator(mode="after")
    def _repeat_inside(self) -> "CuttingStackingSpec":
        if not self.stages:
            raise ValueError("A cutting and stacking spec needs at least one stage")
        if self.repeat is not None and not 1 <= self.repeat <= len(self.stages):
            raise ValueError(f"repeat {self.repeat} outside stages 1..{len(self.stages)}")
        return self

    @classmethod
    def uniform(cls, cuts: int, spacers: Tuple[int, ...] = ()) -> "CuttingStackingSpec":
        """One recurring stage, e.g. the dyadic odometer for ``uniform(2)``"""
        return cls(stages=(Stage(cuts=cuts, spacers=spacers or (0,) * cuts),), repeat=1)

    @property
    def is_infinite(self) -> bool:
        return self.repeat is not None

    @property
    def no_spacers(self) -> bool:
        return all(stage.spacer_total == 0 for stage in self.stages)

    @property
    def depth(self) -> Optional[int]:
        """Number of stages of a finite spec"""
        return None if self.is_infinite else len(self.stages)

    def stage(self, n: int) -> Stage:
        if n < 1:
            raise IndexError("Stages are numbered from 1")
        if n <= len(self.stages):
            return self.stages[n - 1]
        if self.repeat is None:
            raise IndexError(f"Finite spec has no stage {n}")
        block = len(self.stages) - self.repeat + 1
        return self.stages[self.repeat - 1 + (n - self.repeat) % block]

    def has_stage(self, n: int) -> bool:
        return n >= 1 and (self.is_infinite or n <= len(self.stages))

    def spacers_after(self, n: int) -> bool:
        """Whether some stage m > n adds spacers"""
        if self.repeat is not None and any(
            stage.spacer_total for stage in self.stages[self.repeat - 1 :]
        ):
            return True
        return any(stage.spacer_total for stage in self.stages[n:])

    def heights(self, count: int) -> List[int]:
        """h_1, …, h_count with h_1 = 1 and h_{n+1} = p_n h_n + Σ_k s_n(k)"""
        out = [1]
        while len(out) < count:
            n = len(out)
            stage = self.stage(n)
            out.append(stage.cuts * out[-1] + stage.spacer_total)
        return out[:count]

    def text(self) -> str:
        lines = [stage.text(n) for n, stage in enumerate(self.stages, start=1)]
        if self.repeat is not None:
            lines.append(f"repeat {self.repeat}")
        return "\n".join(lines)


class RankOneSystem(BaseModel):
    """A cutting and stacking system realized on its Vershik diagram.

    Level n of the diagram holds the tower vertex 0 of height h_{n+1} and,
    while later stages still add spacers, the spacer vertex 1 of height 1.
    """

    model_config = ConfigDict(frozen=True)

    spec: CuttingStackingSpec
    diagram: Diagram
    heights: Tuple[int, ...] = Field(description="h_1 .. h_{depth+1}")

    TOWER: ClassVar[int] = 0
    SPACER: ClassVar[int] = 1

    def height(self, n: int) -> int:
        if n <= len(self.heights):
            return self.heights[n - 1]
        return self.spec.heights(n)[-1]


class InvariantMeasure(BaseModel):
    """The invariant probability measure of the cutting and stacking system"""

    model_config = ConfigDict(frozen=True)

    kind: Literal["invariant"] = "invariant"


class PathAtom(BaseModel):
    """A point mass on the path space"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    weight: Fraction
    path: LazyPath

    @field_validator("weight", mode="before")
    @classmethod
    def _weight_fraction(cls, v):
        return Fraction(v)

    @field_serializer("weight")
    def _weight_text(self, weight: Fraction) -> str:
        return fraction_text(weight)


class AtomicPathMeasure(BaseModel):
    """Finitely many point masses summing to one"""

    model_config = ConfigDict(frozen=True)

    kind: Literal["atomic"] = "atomic"
    atoms: Tuple[PathAtom, ...]

    @model_validator(mode="after")
    def _weights_sum_to_one(self) -> "AtomicPathMeasure":
        total = sum((atom.weight for atom in self.atoms), Fraction(0))
        if total != 1 or any(atom.weight <= 0 for atom in self.atoms):
            raise ValueError(f"Atom weights must be positive and sum to 1, got {total}")
        return self


RankOneMeasure = Annotated[Union[InvariantMeasure, AtomicPathMeasure], Field(discriminator="kind")]


class OdometerApproximation(BaseModel):
    """An odometer S with μ(E(S, T)) bounded above for every measure"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    stage: int
    height: int
    S: CylMap
    eps: Fraction
    bounds: Tuple[Fraction, ...]
    truncation: int

    @property
    def success(self) -> bool:
        return all(bound < self.eps for bound in self.bounds)

    @field_serializer("eps")
    def _eps_text(self, eps: Fraction) -> str:
        return fraction_text(eps)

    @field_serializer("bounds")
    def _bounds_text(self, bounds: Tuple[Fraction, ...]) -> List[str]:
        return [fraction_text(b) for b in bounds]
