"""The ``BBD1`` text format for ordered Bratteli diagrams.

::

    bbd 1
    level 1 vertices 1
    edge 1 0 0 0                 # edge <level> <source> <target> <rank>
    edge 1 0 0 1
    generator stationary         # or: generator periodic
    pattern
    row 2 order 0 0              # incidence row of one target, then its sources by rank

Level 0 is the implicit root. Levels are declared in order, each before its
edges. The canonical form lists edges sorted by (target, rank) right after
their level line and one ``pattern`` block per generator pattern.
"""

import logging
from collections import Counter
from typing import List, Optional, Set, Tuple

from ...domain.entities.bratteli import Diagram, DiagramGenerator, Edge, LevelPattern
from ...domain.interfaces.codecs import TextCodec
from ...domain.models.errors import FormatSemanticError
from .lines import Line, LineCursor

logger = logging.getLogger(__name__)

HEADER = "bbd 1"


class DiagramCodec(TextCodec[Diagram]):
    """Parser and canonical serializer for ``BBD1`` files"""

    suffix = ".bbd"

    def parse(self, text: str) -> Diagram:
        cursor = LineCursor(text)
        if cursor.at_end():
            raise cursor.end_error("empty input, expected 'bbd 1'")
        first = cursor.next()
        if first.words() != ["bbd", "1"]:
            raise first.syntax_error("expected header 'bbd 1'")

        counts: List[int] = [1]
        edges: List[Tuple[int, int, int, int]] = []
        ranks: Set[Tuple[int, int, int]] = set()
        generator: Optional[DiagramGenerator] = None

        while not cursor.at_end():
            line = cursor.next()
            keyword = line.keyword
            if keyword == "level":
                self._level(line, counts)
            elif keyword == "edge":
                edges.append(self._edge(line, counts, ranks))
            elif keyword == "generator":
                generator = self._generator(line, cursor, counts[-1])
                if not cursor.at_end():
                    raise cursor.next().syntax_error("nothing may follow the generator")
            else:
                raise line.syntax_error(f"unknown statement '{keyword}'")

        try:
            diagram = Diagram.from_edges(counts, edges, generator)
        except ValueError as e:
            raise FormatSemanticError(str(e), first.number) from None
        logger.debug(f"Parsed diagram with {diagram.depth} level(s)")
        return diagram

    def _level(self, line: Line, counts: List[int]) -> None:
        if len(line.tokens) != 4:
            raise line.syntax_error("expected 'level <n> vertices <k>'")
        n = line.integer(1)
        line.expect(2, "vertices")
        k = line.integer(3)
        if n != len(counts):
            raise line.semantic_error(f"expected level {len(counts)}, got level {n}", 1)
        if k < 1:
            raise line.semantic_error("a level needs at least one vertex", 3)
        counts.append(k)

    def _edge(
        self, line: Line, counts: List[int], ranks: Set[Tuple[int, int, int]]
    ) -> Tuple[int, int, int, int]:
        if len(line.tokens) != 5:
            raise line.syntax_error("expected 'edge <level> <source> <target> <rank>'")
        n, source, target, rank = (line.integer(i, minimum=0) for i in range(1, 5))
        if not 1 <= n < len(counts):
            raise line.semantic_error(f"edge at undeclared level {n}", 1)
        if source >= counts[n - 1]:
            raise line.semantic_error(f"level {n - 1} has no vertex {source}", 2)
        if target >= counts[n]:
            raise line.semantic_error(f"level {n} has no vertex {target}", 3)
        if (n, target, rank) in ranks:
            raise line.semantic_error(f"duplicate rank {rank} into vertex {target} of level {n}", 4)
        ranks.add((n, target, rank))
        return n, source, target, rank

    def _generator(self, line: Line, cursor: LineCursor, width: int) -> DiagramGenerator:
        if len(line.tokens) != 2 or line.tokens[1].text not in ("stationary", "periodic"):
            raise line.syntax_error("expected 'generator stationary' or 'generator periodic'", 1)
        kind = line.tokens[1].text
        patterns: List[LevelPattern] = []
        while not cursor.at_end():
            start = cursor.next()
            if start.words() != ["pattern"]:
                raise start.syntax_error("expected 'pattern'")
            patterns.append(self._pattern(start, cursor, width))
            width = patterns[-1].targets
        if not patterns:
            raise line.semantic_error("generator without patterns")
        try:
            return DiagramGenerator(kind=kind, patterns=tuple(patterns))
        except ValueError as e:
            raise line.semantic_error(str(e)) from None

    def _pattern(self, start: Line, cursor: LineCursor, width: int) -> LevelPattern:
        rows: List[Tuple[int, ...]] = []
        order: List[Tuple[int, ...]] = []
        while cursor.peek() is not None and cursor.peek().keyword == "row":
            line = cursor.next()
            words = line.words()
            if "order" not in words:
                raise line.syntax_error("expected 'row <counts> order <sources>'")
            split = words.index("order")
            row = tuple(line.integers(1, split, minimum=0))
            sources = tuple(line.integers(split + 1, minimum=0))
            if len(row) != width:
                raise line.semantic_error(f"row has {len(row)} entries for {width} source vertices", 1)
            expected = {k: a for k, a in enumerate(row) if a}
            if dict(Counter(sources)) != expected:
                raise line.semantic_error("order does not match the incidence row", split + 1)
            rows.append(row)
            order.append(sources)
        if not rows:
            raise start.semantic_error("pattern without rows")
        return LevelPattern(rows=tuple(rows), order=tuple(order))

    def serialize(self, value: Diagram) -> str:
        lines = [HEADER]
        for n in range(1, value.depth + 1):
            lines.append(f"level {n} vertices {value.vertex_counts[n]}")
            for edge in sorted(value.edges[n - 1], key=Edge.sort_key):
                lines.append(f"edge {n} {edge.source} {edge.target} {edge.rank}")
        if value.generator is not None:
            lines.append(f"generator {value.generator.kind}")
            for pattern in value.generator.patterns:
                lines.append("pattern")
                for row, sources in zip(pattern.rows, pattern.order):
                    lines.append(
                        "row " + " ".join(map(str, row)) + " order " + " ".join(map(str, sources))
                    )
        return "\n".join(lines) + "\n"

