"""Rank-one domain service: cutting and stacking on Vershik diagrams and odometer approximation."""

import logging
from fractions import Fraction
from typing import List, Optional, Sequence

from ..entities.bratteli import Diagram, DiagramGenerator, LevelPattern
from ..entities.paths import LazyPath
from ..entities.rank_one import (
    AtomicPathMeasure,
    CuttingStackingSpec,
    OdometerApproximation,
    PathAtom,
    RankOneMeasure,
    RankOneSystem,
    Stage,
)
from ..entities.symbolic import Point, SeqSpace
from ..interfaces.events import EventPublisher
from ..models.errors import LevelOutOfRangeError, StageBudgetError, UnresolvedError
from ..models.events import CertificateIssued, ConstructionCompleted
from ..models.value_objects import Interval, Word, fraction_text
from ...utils.trace_logger import trace_operation
from .odometer_service import OdometerService
from .vershik_service import VershikService

logger = logging.getLogger(__name__)


class RankOneService:
    """Domain service for rank-one systems given by cutting and stacking."""

    def __init__(
        self,
        odometer_service: Optional[OdometerService] = None,
        vershik_service: Optional[VershikService] = None,
        event_publisher: Optional[EventPublisher] = None,
        max_stage: int = 64,
        truncation_gap: int = 12,
    ):
        self.odometer = odometer_service or OdometerService()
        self.vershik = vershik_service or VershikService()
        self._event_publisher = event_publisher
        self.max_stage = max_stage
        self.truncation_gap = truncation_gap
        logger.info("Rank-one service initialized")

    # -- diagram ---------------------------------------------------------

    def _spacer_vertex(self, spec: CuttingStackingSpec, n: int) -> bool:
        return n >= 1 and spec.spacers_after(n)

    def stage_pattern(self, spec: CuttingStackingSpec, n: int) -> LevelPattern:
        """Edges of level n: each column is a copy of the tower followed by its spacers"""
        stage = spec.stage(n)
        sources = 1 + int(self._spacer_vertex(spec, n - 1))
        # the root feeds the first level's spacers
        spacer_source = RankOneSystem.SPACER if n > 1 else 0
        tower_order: List[int] = []
        for count in stage.spacers:
            tower_order.append(RankOneSystem.TOWER)
            tower_order.extend([spacer_source] * count)
        order = [tuple(tower_order)]
        if self._spacer_vertex(spec, n):
            order.append((spacer_source,))
        rows = tuple(tuple(sources_order.count(k) for k in range(sources)) for sources_order in order)
        return LevelPattern(rows=rows, order=tuple(order))

    @trace_operation("rank1_build")
    def rank1_build(self, spec: CuttingStackingSpec, N: int) -> RankOneSystem:
        """The Vershik diagram of a cutting and stacking spec to at least N levels.

        Recurring specs are materialized past their last listed stage and
        continue through a stationary or periodic generator.
        """
        if N < 1:
            raise LevelOutOfRangeError("A rank-one diagram needs at least one level")
        if not spec.is_infinite and N > len(spec.stages):
            raise LevelOutOfRangeError(f"Finite spec has only {len(spec.stages)} stage(s)")
        depth = max(N, len(spec.stages)) if spec.is_infinite else N

        counts = [1]
        edges = []
        for n in range(1, depth + 1):
            pattern = self.stage_pattern(spec, n)
            counts.append(pattern.targets)
            edges.extend((e.level, e.source, e.target, e.rank) for e in pattern.edges(n))

        generator = None
        if spec.is_infinite:
            block = len(spec.stages) - spec.repeat + 1
            patterns = tuple(self.stage_pattern(spec, depth + i) for i in range(1, block + 1))
            generator = DiagramGenerator(
                kind="stationary" if block == 1 else "periodic", patterns=patterns
            )

        diagram = Diagram.from_edges(counts, edges, generator)
        heights = tuple(spec.heights(depth + 1))
        logger.info(f"Rank-one diagram built to level {depth}: heights {heights[:6]}…")
        if self._event_publisher:
            self._event_publisher.publish(
                ConstructionCompleted(aggregate_id="rank-one", construction="rank1_build", levels=depth)
            )
        return RankOneSystem(spec=spec, diagram=diagram, heights=heights)

    # -- approximants ------------------------------------------------------

    def approximant(self, system: RankOneSystem, n: int, y: LazyPath) -> Optional[LazyPath]:
        """T_n y: the Vershik successor while y stays below the top of ξ_n, else undefined"""
        if n <= 1:
            return None
        prefix = y.prefix(n - 1)
        if prefix.terminal != RankOneSystem.TOWER:
            return None
        if self.vershik.rank(system.diagram, prefix) >= system.height(n) - 1:
            return None
        return self.vershik.successor(y)

    def check_extension(self, system: RankOneSystem, n: int, paths: Sequence[LazyPath]) -> bool:
        """T_{n+1} agrees with T_n wherever T_n is defined"""
        depth = n + 1
        if not system.diagram.is_infinite:
            depth = min(depth, system.diagram.depth)
        for y in paths:
            current = self.approximant(system, n, y)
            if current is None:
                continue
            following = self.approximant(system, n + 1, y)
            if following is None or following.prefix(depth) != current.prefix(depth):
                logger.warning(f"T_{n + 1} does not extend T_{n} at {y.prefix(depth).text()}")
                return False
        return True

    # -- invariant measure ---------------------------------------------------

    def level_measure(self, spec: CuttingStackingSpec, n: int, N: Optional[int] = None) -> Interval:
        """Bounds on the invariant mass of one level of ξ_n from the stages up to N.

        An upper bound is Π_{n≤k<N} p_k / h_N. The lower bound needs every
        later stage to cut into at least two columns; the spacer mass they
        can still add is then below S_max / h_N of what remains.
        """
        if not spec.is_infinite:
            N = len(spec.stages) + 1
        N = max(N or n + self.truncation_gap, n)
        heights = spec.heights(N)
        product = 1
        for k in range(n, N):
            product *= spec.stage(k).cuts
        upper = Fraction(product, heights[N - 1])
        if not spec.is_infinite:
            return Interval.exact(upper)

        later = [spec.stage(j) for j in range(N, max(N, len(spec.stages)) + len(spec.stages))]
        if any(stage.cuts < 2 for stage in later):
            return Interval(lo=Fraction(0), hi=upper)
        spacer_max = max(stage.spacer_total for stage in later)
        lower = upper * max(Fraction(0), 1 - Fraction(spacer_max, heights[N - 1]))
        return Interval(lo=lower, hi=upper)

    def _atom_exposed(self, system: RankOneSystem, n: int, atom: PathAtom) -> bool:
        """Whether the atom sits in the base, the top or outside ξ_n"""
        if n <= 1:
            return True
        prefix = atom.path.prefix(n - 1)
        if prefix.terminal != RankOneSystem.TOWER:
            return True
        rank = self.vershik.rank(system.diagram, prefix)
        return rank in (0, system.height(n) - 1)

    def e_bound(
        self, system: RankOneSystem, n: int, measure: RankOneMeasure, N: Optional[int] = None
    ) -> Fraction:
        """Upper bound on μ(base_n ∪ top_n ∪ X∖Y_n), which contains E(S, T)"""
        if isinstance(measure, AtomicPathMeasure):
            return sum(
                (atom.weight for atom in measure.atoms if self._atom_exposed(system, n, atom)),
                Fraction(0),
            )
        level = self.level_measure(system.spec, n, N)
        return min(Fraction(1), 2 * level.hi + 1 - system.height(n) * level.lo)

    def _odometer_space(self, spec: CuttingStackingSpec, n: int, height: int) -> SeqSpace:
        """Alphabet h_n + 1 for the cyclic S-tower, then the later cuts"""
        head = [height + 1]
        if spec.is_infinite:
            k = n
            while k < spec.repeat or (k - spec.repeat) % (len(spec.stages) - spec.repeat + 1):
                head.append(spec.stage(k).cuts)
                k += 1
            period = [stage.cuts for stage in spec.stages[spec.repeat - 1 :]]
        else:
            head.extend(stage.cuts for stage in spec.stages[n - 1 :])
            period = []
        head = [c for c in head if c >= 2]
        period = [c for c in period if c >= 2] or [2]
        return SeqSpace(head=tuple(head), period=tuple(period))

    def _cut_space(self, spec: CuttingStackingSpec) -> SeqSpace:
        """The odometer of a spacer-free spec; single-column stages drop out"""
        start = (spec.repeat or len(spec.stages) + 1) - 1
        head = tuple(s.cuts for s in spec.stages[:start] if s.cuts >= 2)
        period = tuple(s.cuts for s in spec.stages[start:] if s.cuts >= 2)
        return SeqSpace(head=head, period=period or (2,))

    @trace_operation("odometer_approx")
    def odometer_approx(
        self,
        system: RankOneSystem,
        measures: Sequence[RankOneMeasure],
        eps: Fraction,
    ) -> OdometerApproximation:
        """The first stage n whose S-tower (ξ_n, X∖Y_n) keeps every μ(E(S,T)) below ε"""
        eps = Fraction(eps)
        spec = system.spec
        if spec.no_spacers:
            space = self._cut_space(spec)
            return self._issue(
                OdometerApproximation(
                    stage=1,
                    height=1,
                    S=self.odometer.odometer_map(space),
                    eps=eps,
                    bounds=tuple(Fraction(0) for _ in measures),
                    truncation=1,
                )
            )

        last = self.max_stage if spec.is_infinite else system.diagram.depth + 1
        for n in range(1, last + 1):
            truncation = n + self.truncation_gap if spec.is_infinite else len(spec.stages) + 1
            bounds = tuple(self.e_bound(system, n, mu, truncation) for mu in measures)
            logger.debug(f"Stage {n}: bounds {[fraction_text(b) for b in bounds]}")
            if all(bound < eps for bound in bounds):
                height = system.spec.heights(n)[-1]
                space = self._odometer_space(spec, n, height)
                return self._issue(
                    OdometerApproximation(
                        stage=n,
                        height=height,
                        S=self.odometer.odometer_map(space),
                        eps=eps,
                        bounds=bounds,
                        truncation=truncation,
                    )
                )
        raise StageBudgetError(f"No stage up to {last} brings every bound below {fraction_text(eps)}")

    # -- coding into the odometer ------------------------------------------

    @staticmethod
    def _copy_index(stage: Stage, rank: int) -> Optional[int]:
        """Which copy of the previous tower an edge of this rank enters; None for a spacer"""
        position = 0
        for copy, count in enumerate(stage.spacers):
            if rank == position:
                return copy
            position += 1 + count
        return None

    def _tower_level(self, system: RankOneSystem, n: int, y: LazyPath) -> Optional[int]:
        """Level of ξ_n holding y, or None on the leftover X∖ξ_n"""
        if n <= 1:
            return 0
        prefix = y.prefix(n - 1)
        if prefix.terminal != RankOneSystem.TOWER:
            return None
        return self.vershik.rank(system.diagram, prefix)

    def coding(
        self, system: RankOneSystem, approximation: OdometerApproximation, y: LazyPath, stages: int = 8
    ) -> Word:
        """The first digits of y in the coordinates of S.

        Digit 0 is the level of the S-tower (h_n for the leftover) unless the
        spec is spacer-free; every later digit is the copy of the previous tower
        that y climbs through at a stage with two or more cuts. Leftover points
        read 0 where they enter as a spacer.
        """
        spec = system.spec
        n = 1 if spec.no_spacers else approximation.stage
        last = n + stages - 1
        if not system.diagram.is_infinite:
            last = min(last, system.diagram.depth)
        edges = y.edges(last)

        digits: List[int] = []
        level = self._tower_level(system, n, y)
        for k in range(n, last + 1):
            stage = spec.stage(k)
            copy = self._copy_index(stage, edges[k - 1].rank)
            if copy is None:
                if k == n:
                    level = None
                copy = 0
            if stage.cuts >= 2:
                digits.append(copy)
        if spec.no_spacers:
            return tuple(digits)
        return (approximation.height if level is None else level,) + tuple(digits)

    def check_agreement(
        self,
        system: RankOneSystem,
        approximation: OdometerApproximation,
        paths: Sequence[LazyPath],
        stages: int = 8,
    ) -> int:
        """S and T agree, read through ``coding``, at every sampled path below the top of ξ_n.

        Returns how many paths were compared; paths on the top or the leftover
        are skipped. Raises UnresolvedError on the first disagreement.
        """
        n = approximation.stage
        compared = 0
        for y in paths:
            if not system.spec.no_spacers:
                level = self._tower_level(system, n, y)
                if level is None or level >= approximation.height - 1:
                    continue
            code = self.coding(system, approximation, y, stages)
            expected = self.odometer.symbolic.apply_point(approximation.S, Point.from_word(code))
            moved = self.coding(system, approximation, self.vershik.successor(y), stages)
            if moved != expected.prefix(len(code)):
                raise UnresolvedError(
                    f"S and T disagree at {y.prefix(n).text()}: {moved} against {expected.prefix(len(code))}"
                )
            compared += 1
        logger.debug(f"S agrees with T on {compared} of {len(paths)} sampled paths")
        return compared

    def _issue(self, approximation: OdometerApproximation) -> OdometerApproximation:
        logger.info(
            f"Odometer approximation at stage {approximation.stage}: "
            f"bounds {[fraction_text(b) for b in approximation.bounds]}"
        )
        if self._event_publisher:
            self._event_publisher.publish(
                CertificateIssued(
                    aggregate_id=f"odometer-approx-{approximation.stage}",
                    certificate_kind="odometer_approx",
                    success=approximation.success,
                    summary={"stage": str(approximation.stage)},
                )
            )
        return approximation
