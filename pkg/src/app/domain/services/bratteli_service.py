"""Bratteli diagram domain service: validation, incidence, telescoping and splitting."""

import logging
from collections import Counter
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import sympy
from pydantic import BaseModel, ConfigDict

from ..entities.bratteli import (
    Defect,
    Diagram,
    DiagramGenerator,
    Edge,
    IncidenceMatrix,
    LevelPattern,
    SpecialDiagramSpec,
    ValidationReport,
)
from ..interfaces.events import EventPublisher
from ..models.errors import LevelOutOfRangeError, NonMonotoneCutsError
from ..models.events import ValidationCompleted
from ..models.value_objects import Verdict

logger = logging.getLogger(__name__)


class ExtremesAnswer(BaseModel):
    """Answer of the eventually-extreme path check"""

    model_config = ConfigDict(frozen=True)

    verdict: Verdict
    level: Optional[int] = None
    detail: str = ""


class BratteliService:
    """Domain service for ordered Bratteli diagrams."""

    def __init__(self, event_publisher: Optional[EventPublisher] = None):
        self._event_publisher = event_publisher
        logger.info("Bratteli service initialized")

    # -- builders ------------------------------------------------------------

    def stationary_diagram(
        self,
        pattern: LevelPattern,
        depth: int,
        first_level: Optional[LevelPattern] = None,
    ) -> Diagram:
        """Materialize ``depth`` levels of a stationary diagram and keep the generator.

        The first level defaults to ``row sum`` parallel edges from the root
        into each vertex.
        """
        if depth < 1:
            raise LevelOutOfRangeError("A stationary diagram needs at least one level")
        if first_level is None:
            first_level = LevelPattern(
                rows=tuple((sum(row),) for row in pattern.rows),
                order=tuple((0,) * sum(row) for row in pattern.rows),
            )
        counts = [1, first_level.targets] + [pattern.targets] * (depth - 1)
        edges = [first_level.edges(1)] + [pattern.edges(n) for n in range(2, depth + 1)]
        return Diagram(
            vertex_counts=tuple(counts),
            edges=tuple(tuple(sorted(level, key=Edge.sort_key)) for level in edges),
            generator=DiagramGenerator(kind="stationary", patterns=(pattern,)),
        )

    # -- validation --------------------------------------------------------

    def validate(self, D: Diagram, up_to_level: Optional[int] = None) -> ValidationReport:
        """Structural defects up to a level; defects are data, not failures"""
        level = D.depth if up_to_level is None else up_to_level
        D.ensure_level(level)
        defects: List[Defect] = []

        if D.vertex_count(0) != 1:
            defects.append(
                Defect(
                    clause="single-root",
                    level=0,
                    message=f"Level 0 has {D.vertex_count(0)} vertices instead of one root",
                )
            )
        for n in range(0, level + 1):
            for v in range(D.vertex_count(n)):
                if n >= 1:
                    incoming = D.incoming(n, v)
                    if not incoming:
                        defects.append(
                            Defect(clause="range-nonempty", level=n, vertex=v, message="No incoming edges")
                        )
                    defects.extend(self._rank_defects(n, v, incoming))
                if n + 1 <= D.depth or D.is_infinite:
                    if not D.outgoing(n, v):
                        defects.append(
                            Defect(clause="source-nonempty", level=n, vertex=v, message="No outgoing edges")
                        )

        report = ValidationReport(up_to_level=level, defects=tuple(defects))
        logger.info(f"Validated diagram to level {level}: {len(defects)} defect(s)")
        if self._event_publisher:
            self._event_publisher.publish(
                ValidationCompleted(
                    aggregate_id=f"diagram-{level}",
                    defect_count=len(defects),
                    clauses=report.clauses,
                )
            )
        return report

    def _rank_defects(self, n: int, v: int, incoming: Sequence[Edge]) -> List[Defect]:
        defects = []
        ranks = Counter(e.rank for e in incoming)
        duplicates = sorted(r for r, c in ranks.items() if c > 1)
        if duplicates:
            defects.append(
                Defect(
                    clause="rank-duplicate",
                    level=n,
                    vertex=v,
                    message=f"Order ranks {duplicates} repeat",
                )
            )
        missing = sorted(set(range(len(incoming))) - set(ranks))
        if missing and not duplicates:
            defects.append(
                Defect(
                    clause="rank-gap",
                    level=n,
                    vertex=v,
                    message=f"Order ranks {missing} missing",
                )
            )
        return defects

    # -- incidence and level operations ----------------------------------

    def incidence(self, D: Diagram, n: int) -> IncidenceMatrix:
        if n < 1:
            raise LevelOutOfRangeError("Incidence matrices start at level 1")
        D.ensure_level(n)
        rows = [[0] * D.vertex_count(n - 1) for _ in range(D.vertex_count(n))]
        for edge in D.level_edges(n):
            rows[edge.target][edge.source] += 1
        return IncidenceMatrix(level=n, rows=tuple(tuple(row) for row in rows))

    def incidence_product(self, D: Diagram, start: int, stop: int) -> IncidenceMatrix:
        """M_stop ⋯ M_{start+1}: path counts from level ``start`` to level ``stop``"""
        product = sympy.eye(D.vertex_count(start))
        for n in range(start + 1, stop + 1):
            product = self.incidence(D, n).as_sympy() * product
        return IncidenceMatrix.from_sympy(stop, product)

    def _paths_down(self, D: Diagram, bottom: int, top: int, v: int) -> Iterator[int]:
        """Sources at ``bottom`` of the paths into (top, v), in lexicographic order"""
        if top == bottom:
            yield v
            return
        for edge in D.incoming(top, v):
            yield from self._paths_down(D, bottom, top - 1, edge.source)

    def telescope(self, D: Diagram, cuts: Sequence[int]) -> Diagram:
        """Compose the edges between consecutive cut levels"""
        cuts = list(cuts)
        if not cuts or cuts[0] != 0 or any(b <= a for a, b in zip(cuts, cuts[1:])):
            raise NonMonotoneCutsError(f"Cuts must increase strictly from 0: {cuts}")
        D.ensure_level(cuts[-1])
        D = D.extended(cuts[-1])

        counts = [D.vertex_count(m) for m in cuts]
        levels: List[Tuple[Edge, ...]] = []
        for n, (bottom, top) in enumerate(zip(cuts, cuts[1:]), start=1):
            level: List[Edge] = []
            for v in range(D.vertex_count(top)):
                for rank, source in enumerate(self._paths_down(D, bottom, top, v)):
                    level.append(Edge(level=n, source=source, target=v, rank=rank))
            levels.append(tuple(sorted(level, key=Edge.sort_key)))

        generator = D.generator if cuts[-1] == D.depth else None
        logger.debug(f"Telescoped {D.depth} levels along {cuts}")
        return Diagram(vertex_counts=tuple(counts), edges=tuple(levels), generator=generator)

    def split(self, D: Diagram, level: int) -> Diagram:
        """Insert one vertex per edge of E_level between V_{level-1} and V_level"""
        if level < 1:
            raise LevelOutOfRangeError("Splitting starts at level 1")
        D.ensure_level(level)
        D = D.extended(level)

        inserted = D.level_edges(level)
        counts = list(D.vertex_counts[:level]) + [len(inserted)] + list(D.vertex_counts[level:])
        levels: List[Tuple[Edge, ...]] = list(D.edges[: level - 1])
        levels.append(
            tuple(
                Edge(level=level, source=e.source, target=i, rank=0)
                for i, e in enumerate(inserted)
            )
        )
        upper = [
            Edge(level=level + 1, source=i, target=e.target, rank=e.rank)
            for i, e in enumerate(inserted)
        ]
        levels.append(tuple(sorted(upper, key=Edge.sort_key)))
        for n in range(level + 1, D.depth + 1):
            levels.append(
                tuple(e.model_copy(update={"level": n + 1}) for e in D.level_edges(n))
            )
        return Diagram(vertex_counts=tuple(counts), edges=tuple(levels), generator=D.generator)

    # -- special diagrams ------------------------------------------------

    def validate_special(
        self, D: Diagram, spec: SpecialDiagramSpec, up_to_level: Optional[int] = None
    ) -> ValidationReport:
        """Check the block conditions of a special diagram level by level"""
        top = min(D.depth, spec.depth) if up_to_level is None else up_to_level
        D.ensure_level(top)
        defects: List[Defect] = []

        def flag(clause: str, n: int, v: Optional[int], message: str) -> None:
            defects.append(Defect(clause=clause, level=n, vertex=v, message=message))

        for n in range(1, top + 1):
            here = spec.at(n)
            blocks = here.all_blocks()

            seen: Dict[int, int] = {}
            for j, members in blocks.items():
                if j < n:
                    flag("block-partition", n, None, f"Block index {j} precedes the level")
                for v in members:
                    if v in seen:
                        flag("block-partition", n, v, f"Vertex in blocks {seen[v]} and {j}")
                    seen[v] = j
                if len(members) < 2:
                    flag("block-size", n, None, f"Block {j} has {len(members)} vertex")
            uncovered = sorted(set(range(D.vertex_count(n))) - set(seen))
            if uncovered:
                flag("block-partition", n, None, f"Vertices {uncovered} belong to no block")
            if len(here.zero) < 2:
                flag("fan-in-part-size", n, None, f"Fan-in part has {len(here.zero)} vertex")

            for v in range(D.vertex_count(n)):
                incoming = D.incoming(n, v)
                single = v in here.one or any(v in m for j, m in here.blocks.items())
                if single and len(incoming) != 1:
                    flag("single-edge", n, v, f"Expected one incoming edge, found {len(incoming)}")
                if v in here.zero and len(incoming) < 4:
                    flag("fan-in", n, v, f"Expected at least four incoming edges, found {len(incoming)}")

            if n == 1:
                # every level-1 edge leaves the root
                continue
            below = spec.at(n - 1)
            for j, members in here.blocks.items():
                sources = {e.source for v in members for e in D.incoming(n, v)}
                stray = sorted(sources - set(below.block(j)))
                if stray:
                    flag("forward-source", n, None, f"Block {j} draws from {stray} outside block {j} below")
                if sources != set(below.block(j)):
                    missing = sorted(set(below.block(j)) - sources)
                    if missing:
                        flag("forward-cover", n, None, f"Vertices {missing} of block {j} below feed nothing")
            for v in here.one:
                for e in D.incoming(n, v):
                    if e.source not in below.block(n):
                        flag("single-source", n, v, f"Source {e.source} outside block {n} below")
            last_ok = set(below.one) | {
                u for j, m in below.blocks.items() if j >= n for u in m
            }
            for v in here.zero:
                incoming = D.incoming(n, v)
                if len(incoming) < 2:
                    continue
                if incoming[0].source not in below.block(n):
                    flag("fan-in-order", n, v, "Least edge does not come from the forward block below")
                for e in incoming[1:-1]:
                    if e.source not in below.own:
                        flag("fan-in-order", n, v, f"Middle edge of rank {e.rank} leaves the own block below")
                if incoming[-1].source not in last_ok:
                    flag("fan-in-order", n, v, "Greatest edge leaves neither the single-edge part nor a forward block")
            fed = {e.source for v in here.own for e in D.incoming(n, v)}
            missing = sorted(set(below.block(n)) - fed)
            if missing:
                flag("own-cover", n, None, f"Vertices {missing} of block {n} below feed nothing")

        report = ValidationReport(up_to_level=top, defects=tuple(defects))
        logger.info(f"Special structure checked to level {top}: {len(defects)} defect(s)")
        return report

    # -- eventually extreme paths ----------------------------------------

    def _has_extreme_cycle(self, generator: DiagramGenerator, pick_max: bool) -> bool:
        """Cycle in the backward graph following extreme edges of the generated levels"""
        period = len(generator.patterns)
        arcs: Dict[Tuple[int, int], Tuple[int, int]] = {}
        for phase, pattern in enumerate(generator.patterns):
            for target, sources in enumerate(pattern.order):
                if sources:
                    source = sources[-1] if pick_max else sources[0]
                    arcs[(phase, target)] = ((phase - 1) % period, source)
        for start in arcs:
            node, visited = start, set()
            while node in arcs and node not in visited:
                visited.add(node)
                node = arcs[node]
            if node in visited:
                return True
        return False

    def check_no_cofinal_extremes(
        self, D: Diagram, special: Optional[SpecialDiagramSpec] = None
    ) -> ExtremesAnswer:
        """Whether no infinite path is eventually maximal or eventually minimal"""
        if D.generator is not None:
            for pick_max, name in ((True, "maximal"), (False, "minimal")):
                if self._has_extreme_cycle(D.generator, pick_max):
                    return ExtremesAnswer(
                        verdict=Verdict.NO,
                        detail=f"Extreme-edge cycle yields an eventually {name} path",
                    )
            return ExtremesAnswer(verdict=Verdict.YES, detail="Extreme-edge graphs are acyclic")

        if special is not None:
            # A truncation holds no extreme cycle to search. The verdict rests on
            # the block clauses alone, and it covers only the levels they were
            # checked on.
            structural = self.validate(D)
            blocks = self.validate_special(D, special)
            if structural.is_valid and blocks.is_valid:
                return ExtremesAnswer(
                    verdict=Verdict.YES,
                    level=blocks.up_to_level,
                    detail=(
                        f"Block clauses hold to level {blocks.up_to_level}: "
                        "extreme edges pass through fresh blocks"
                    ),
                )
        return ExtremesAnswer(
            verdict=Verdict.UNKNOWN,
            level=D.depth,
            detail="Finite truncation without a generator",
        )
