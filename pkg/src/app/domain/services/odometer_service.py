"""Odometer domain service: adic arithmetic, the adic metric and translation maps."""

import logging
from fractions import Fraction
from typing import List, Optional, Tuple

from ..entities.adic import AdicInt, Translation
from ..entities.bratteli import Diagram, DiagramGenerator, Edge, LevelPattern
from ..entities.cylmap import CylMap, Rule
from ..entities.symbolic import Point, SeqSpace
from ..models.errors import LevelOutOfRangeError
from .symbolic_service import SymbolicService

logger = logging.getLogger(__name__)


class OdometerService:
    """Domain service for the p_t-adic odometer group."""

    def __init__(self, symbolic_service: Optional[SymbolicService] = None):
        self.symbolic = symbolic_service or SymbolicService()
        logger.info("Odometer service initialized")

    # -- group operations ----------------------------------------------

    def add(self, x: AdicInt, b: AdicInt) -> AdicInt:
        x.space.ensure_same(b.space)
        return AdicInt(space=x.space, value=x.space.add(x.value, b.value))

    def add_one(self, x: AdicInt) -> AdicInt:
        return self.add(x, AdicInt.one(x.space))

    def neg(self, x: AdicInt) -> AdicInt:
        return AdicInt(space=x.space, value=x.space.negate(x.value))

    def sub(self, x: AdicInt, b: AdicInt) -> AdicInt:
        return self.add(x, self.neg(b))

    def adic_metric(self, x: AdicInt, y: AdicInt) -> Fraction:
        """1/(n+1) for the first differing digit n; 0 when equal"""
        x.space.ensure_same(y.space)
        n = x.space.first_difference(x.value, y.value)
        return Fraction(0) if n is None else Fraction(1, n + 1)

    # -- maps --------------------------------------------------------------

    def translation_map(self, b: AdicInt, depth_budget: Optional[int] = None) -> CylMap:
        """x ↦ x + b as a lazy rule table.

        Raises BudgetExceededError when the carries of ``b`` do not settle
        into finitely many exceptional points within the budget.
        """
        table = CylMap(space=b.space, rules=(Rule(source=(), target=(), addend=b.value),))
        exceptional = self.symbolic.exceptional_points(table, depth_budget)
        logger.debug(f"Translation by {b}: {len(exceptional)} exceptional point(s)")
        return table

    def translation(self, t: Translation, depth_budget: Optional[int] = None) -> CylMap:
        return self.translation_map(t.b, depth_budget)

    def odometer_map(self, space: SeqSpace) -> CylMap:
        """T x = x + 1"""
        return self.translation_map(AdicInt.one(space))

    def exceptional_points(self, b: AdicInt) -> List[Tuple[Point, Point]]:
        return self.symbolic.exceptional_points(self.translation_map(b))

    # -- diagram bridge ------------------------------------------------

    def _level_pattern(self, size: int) -> LevelPattern:
        return LevelPattern(rows=((size,),), order=((0,) * size,))

    def to_vershik_diagram(self, space: SeqSpace, N: int) -> Diagram:
        """One vertex per level; level n carries λ_{n-1} edges ranked by digit.

        A periodic generator continues the diagram once the materialized
        part covers the non-repeating head of the alphabet sizes.
        """
        if N < 1:
            raise LevelOutOfRangeError("The odometer diagram needs at least one level")
        edges = tuple(
            tuple(Edge(level=n, source=0, target=0, rank=r) for r in range(space.size(n - 1)))
            for n in range(1, N + 1)
        )
        generator = None
        if N >= len(space.head):
            cycle = len(space.period)
            patterns = tuple(self._level_pattern(space.size(N + i)) for i in range(cycle))
            generator = DiagramGenerator(
                kind="stationary" if cycle == 1 else "periodic", patterns=patterns
            )
        return Diagram(vertex_counts=(1,) * (N + 1), edges=edges, generator=generator)
