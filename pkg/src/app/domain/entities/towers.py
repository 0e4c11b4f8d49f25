"""Markers, tower partitions and the certificates built from them."""

from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_serializer, model_validator

from ..models.value_objects import ClauseStatus, fraction_text
from .bratteli import Diagram
from .cylmap import CylMap
from .symbolic import CylinderUnion, SeqSpace


class MarkerCertificate(BaseModel):
    """Analytic facts about a marker sequence that finite checks cannot reach"""

    model_config = ConfigDict(frozen=True)

    return_times: Tuple[int, ...] = Field(
        default=(), description="Constant return time to A_n, indexed by n"
    )
    vanishing: bool = False
    note: str = ""

    def return_time(self, n: int) -> Optional[int]:
        if n < len(self.return_times):
            return self.return_times[n]
        return None


class MarkerSeq(BaseModel):
    """Nested sets A_0 = X ⊃ A_1 ⊃ … for an automorphism"""

    model_config = ConfigDict(frozen=True)

    T: CylMap
    sets: Tuple[CylinderUnion, ...]
    certificate: Optional[MarkerCertificate] = None
    name: str = "custom"

    @model_validator(mode="after")
    def _sets_share_the_space(self) -> "MarkerSeq":
        if not self.sets:
            raise ValueError("A marker sequence needs at least A_0")
        for A in self.sets:
            self.T.space.ensure_same(A.space)
            if A.points:
                raise ValueError("Marker sets are cylinder unions")
        return self

    @property
    def space(self) -> SeqSpace:
        return self.T.space

    @property
    def depth(self) -> int:
        """Deepest marker level available"""
        return len(self.sets) - 1

    def level(self, n: int) -> CylinderUnion:
        if not 0 <= n < len(self.sets):
            raise IndexError(f"Marker level {n} outside 0..{self.depth}")
        return self.sets[n]


class Tower(BaseModel):
    """Levels T^0 C, …, T^{k-1} C over a base C"""

    model_config = ConfigDict(frozen=True)

    base: CylinderUnion
    height: int = Field(gt=0)
    levels: Tuple[CylinderUnion, ...]

    @model_validator(mode="after")
    def _one_set_per_level(self) -> "Tower":
        if len(self.levels) != self.height:
            raise ValueError("A tower lists one set per level")
        return self

    @property
    def top(self) -> CylinderUnion:
        return self.levels[-1]


class TowerPartition(BaseModel):
    """Towers over a marker set at a verification depth"""

    model_config = ConfigDict(frozen=True)

    space: SeqSpace
    depth: int
    towers: Tuple[Tower, ...]
    unresolved: CylinderUnion

    @property
    def heights(self) -> Tuple[int, ...]:
        return tuple(t.height for t in self.towers)

    @property
    def is_complete(self) -> bool:
        return self.unresolved.is_empty

    def tower_of_height(self, k: int) -> Optional[Tower]:
        for tower in self.towers:
            if tower.height == k:
                return tower
        return None


class MarkerReport(BaseModel):
    """Clause outcomes of a marker check at one level"""

    model_config = ConfigDict(frozen=True)

    level: int
    depth: int
    clauses: Dict[str, ClauseStatus]
    notes: Tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return all(status == ClauseStatus.PASS for status in self.clauses.values())

    @property
    def failed(self) -> List[str]:
        return [name for name, status in self.clauses.items() if status == ClauseStatus.FAIL]


class KMaximalSet(BaseModel):
    """A set disjoint from its first k-1 iterates whose nearby iterates cover"""

    model_config = ConfigDict(frozen=True)

    k: int
    set: CylinderUnion
    levels: Tuple[Tuple[int, Tuple[int, ...]], ...] = Field(
        description="Chosen level indices per tower height"
    )
    disjoint: ClauseStatus
    covering: ClauseStatus


class TowerSummary(BaseModel):
    """Inventory line of a tower: base, height and mass per measure"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    base: str
    height: int
    masses: Tuple[Fraction, ...]

    @field_serializer("masses")
    def _masses_text(self, masses: Tuple[Fraction, ...]) -> List[str]:
        return [fraction_text(m) for m in masses]


class LevelBounds(BaseModel):
    """Masses deciding whether a marker level is deep enough for a Rokhlin set"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    level: int
    m: int
    short_mass: Tuple[Fraction, ...] = Field(description="Mass of the towers shorter than m")
    leftover_mass: Tuple[Fraction, ...] = Field(
        description="Mass of the last m-1 levels of the tall towers"
    )
    meets: bool

    @field_serializer("short_mass", "leftover_mass")
    def _masses_text(self, masses: Tuple[Fraction, ...]) -> List[str]:
        return [fraction_text(m) for m in masses]


class RokhlinCertificate(BaseModel):
    """F with disjoint iterates F, …, T^{m-1}F and their coverage"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    level: int
    m: int
    eps: Fraction
    F: CylinderUnion
    disjoint: bool
    coverage: Tuple[Fraction, ...]
    bounds: LevelBounds
    towers: Tuple[TowerSummary, ...]

    @property
    def success(self) -> bool:
        return self.disjoint and all(c > 1 - self.eps for c in self.coverage)

    @field_serializer("eps")
    def _eps_text(self, eps: Fraction) -> str:
        return fraction_text(eps)

    @field_serializer("coverage")
    def _coverage_text(self, coverage: Tuple[Fraction, ...]) -> List[str]:
        return [fraction_text(c) for c in coverage]

    @field_serializer("F")
    def _set_text(self, F: CylinderUnion) -> str:
        return str(F)


class DiagramConstruction(BaseModel):
    """A diagram read off nested towers, with the coordinate conjugacy check"""

    model_config = ConfigDict(frozen=True)

    diagram: Diagram
    tower_heights: Tuple[Tuple[int, ...], ...] = Field(description="Heights per level 1..N")
    depth: int
    sampled: int = 0
    conjugacy_failures: int = 0

    @property
    def conjugacy_holds(self) -> bool:
        return self.conjugacy_failures == 0
