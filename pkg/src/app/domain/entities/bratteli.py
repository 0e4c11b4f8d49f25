"""Ordered Bratteli diagrams.

Level 0 holds the root. Level ``n ≥ 1`` holds ``vertex_count(n)`` vertices
indexed from 0 and the edge set E_n from level ``n-1`` into level ``n``.
Levels past the materialized truncation come from an optional periodic
generator.
"""

from collections import Counter
from typing import Dict, List, Literal, Optional, Tuple

import sympy
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, model_validator

from ..models.errors import LevelOutOfRangeError, VertexNotFoundError


class Edge(BaseModel):
    """An edge of E_level from ``source`` in V_{level-1} to ``target`` in V_level"""

    model_config = ConfigDict(frozen=True)

    level: int = Field(ge=1)
    source: int = Field(ge=0)
    target: int = Field(ge=0)
    rank: int = Field(ge=0)

    def sort_key(self) -> Tuple[int, int, int]:
        return (self.target, self.rank, self.source)


class LevelPattern(BaseModel):
    """One generated level: incidence rows and the per-target source order"""

    model_config = ConfigDict(frozen=True)

    rows: Tuple[Tuple[int, ...], ...]
    order: Tuple[Tuple[int, ...], ...]

    @model_validator(mode="after")
    def _order_matches_rows(self) -> "LevelPattern":
        if not self.rows:
            raise ValueError("Generator pattern needs at least one row")
        width = len(self.rows[0])
        if any(len(row) != width for row in self.rows):
            raise ValueError("Generator rows have different lengths")
        if len(self.order) != len(self.rows):
            raise ValueError("Generator order needs one source list per row")
        for i, (row, sources) in enumerate(zip(self.rows, self.order)):
            counts = Counter(sources)
            expected = {k: a for k, a in enumerate(row) if a}
            if dict(counts) != expected:
                raise ValueError(f"Generator order for target {i} does not match row {i}")
        return self

    @property
    def sources(self) -> int:
        return len(self.rows[0])

    @property
    def targets(self) -> int:
        return len(self.rows)

    def edges(self, level: int) -> Tuple[Edge, ...]:
        return tuple(
            Edge(level=level, source=s, target=i, rank=r)
            for i, sources in enumerate(self.order)
            for r, s in enumerate(sources)
        )


class DiagramGenerator(BaseModel):
    """Levels after the truncation repeat ``patterns`` cyclically"""

    model_config = ConfigDict(frozen=True)

    kind: Literal["stationary", "periodic"] = "stationary"
    patterns: Tuple[LevelPattern, ...]

    @model_validator(mode="after")
    def _patterns_chain(self) -> "DiagramGenerator":
        if not self.patterns:
            raise ValueError("Generator needs at least one pattern")
        if self.kind == "stationary" and len(self.patterns) != 1:
            raise ValueError("A stationary generator has exactly one pattern")
        count = len(self.patterns)
        for i, pattern in enumerate(self.patterns):
            following = self.patterns[(i + 1) % count]
            if pattern.targets != following.sources:
                raise ValueError("Consecutive generator patterns do not chain")
        return self

    def pattern(self, offset: int) -> LevelPattern:
        return self.patterns[offset % len(self.patterns)]


class Diagram(BaseModel):
    """An ordered Bratteli diagram truncated at ``depth`` levels"""

    model_config = ConfigDict(frozen=True)

    vertex_counts: Tuple[int, ...] = Field(description="|V_n| for n = 0..depth")
    edges: Tuple[Tuple[Edge, ...], ...] = Field(description="E_n for n = 1..depth")
    generator: Optional[DiagramGenerator] = None

    _generated: Dict[int, Tuple[Edge, ...]] = PrivateAttr(default_factory=dict)
    _incoming: Dict[Tuple[int, int], Tuple[Edge, ...]] = PrivateAttr(default_factory=dict)
    _outgoing: Dict[Tuple[int, int], Tuple[Edge, ...]] = PrivateAttr(default_factory=dict)
    _heights: Dict[int, Tuple[int, ...]] = PrivateAttr(default_factory=dict)

    @model_validator(mode="after")
    def _edges_reference_vertices(self) -> "Diagram":
        if not self.vertex_counts:
            raise ValueError("Diagram needs a root level")
        if len(self.edges) != len(self.vertex_counts) - 1:
            raise ValueError("Edge levels do not match vertex levels")
        for n, level_edges in enumerate(self.edges, start=1):
            for edge in level_edges:
                if edge.level != n:
                    raise ValueError(f"Edge listed at level {n} claims level {edge.level}")
                if edge.source >= self.vertex_counts[n - 1]:
                    raise VertexNotFoundError(f"Level {n - 1} has no vertex {edge.source}")
                if edge.target >= self.vertex_counts[n]:
                    raise VertexNotFoundError(f"Level {n} has no vertex {edge.target}")
        if self.generator is not None and self.generator.patterns[0].sources != self.vertex_counts[-1]:
            raise ValueError("Generator does not continue the last materialized level")
        return self

    # caches are private and must not take part in equality
    def _key(self) -> tuple:
        return (self.vertex_counts, self.edges, self.generator)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Diagram) and self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    @classmethod
    def from_edges(
        cls,
        vertex_counts: List[int],
        edges: List[Tuple[int, int, int, int]],
        generator: Optional[DiagramGenerator] = None,
    ) -> "Diagram":
        """Build from ``(level, source, target, rank)`` tuples"""
        levels: List[List[Edge]] = [[] for _ in range(len(vertex_counts) - 1)]
        for level, source, target, rank in edges:
            if not 1 <= level < len(vertex_counts):
                raise LevelOutOfRangeError(f"Edge level {level} outside the diagram")
            levels[level - 1].append(Edge(level=level, source=source, target=target, rank=rank))
        return cls(
            vertex_counts=tuple(vertex_counts),
            edges=tuple(tuple(sorted(level, key=Edge.sort_key)) for level in levels),
            generator=generator,
        )

    @property
    def depth(self) -> int:
        """Number of materialized levels"""
        return len(self.vertex_counts) - 1

    @property
    def is_infinite(self) -> bool:
        return self.generator is not None

    @property
    def is_stationary(self) -> bool:
        return self.generator is not None and self.generator.kind == "stationary"

    def ensure_level(self, n: int) -> None:
        if n < 0 or (n > self.depth and self.generator is None):
            raise LevelOutOfRangeError(
                f"Level {n} outside the truncation at level {self.depth}"
            )

    def vertex_count(self, n: int) -> int:
        self.ensure_level(n)
        if n <= self.depth:
            return self.vertex_counts[n]
        return self.generator.pattern(n - self.depth - 1).targets

    def ensure_vertex(self, n: int, v: int) -> None:
        if not 0 <= v < self.vertex_count(n):
            raise VertexNotFoundError(f"Level {n} has no vertex {v}")

    def level_edges(self, n: int) -> Tuple[Edge, ...]:
        self.ensure_level(n)
        if n == 0:
            raise LevelOutOfRangeError("Level 0 has no incoming edges")
        if n <= self.depth:
            return self.edges[n - 1]
        if n not in self._generated:
            pattern = self.generator.pattern(n - self.depth - 1)
            self._generated[n] = tuple(sorted(pattern.edges(n), key=Edge.sort_key))
        return self._generated[n]

    def incoming(self, n: int, v: int) -> Tuple[Edge, ...]:
        """r⁻¹(v) sorted by order rank"""
        key = (n, v)
        if key not in self._incoming:
            self.ensure_vertex(n, v)
            self._incoming[key] = tuple(
                sorted((e for e in self.level_edges(n) if e.target == v), key=lambda e: e.rank)
            )
        return self._incoming[key]

    def outgoing(self, n: int, v: int) -> Tuple[Edge, ...]:
        """s⁻¹(v) into level n+1, sorted by (target, rank)"""
        key = (n, v)
        if key not in self._outgoing:
            self.ensure_vertex(n, v)
            self._outgoing[key] = tuple(e for e in self.level_edges(n + 1) if e.source == v)
        return self._outgoing[key]

    def heights(self, n: int) -> Tuple[int, ...]:
        """h(n, ·) for every vertex of level n (counts of paths from the root)"""
        if n == 0:
            return tuple(1 for _ in range(self.vertex_count(0)))
        if n not in self._heights:
            below = self.heights(n - 1)
            totals = [0] * self.vertex_count(n)
            for edge in self.level_edges(n):
                totals[edge.target] += below[edge.source]
            self._heights[n] = tuple(totals)
        return self._heights[n]

    def extended(self, depth: int) -> "Diagram":
        """Materialize generated levels up to ``depth``; the generator is kept"""
        if depth <= self.depth:
            return self
        self.ensure_level(depth)
        counts = [self.vertex_count(n) for n in range(depth + 1)]
        edges = [self.level_edges(n) for n in range(1, depth + 1)]
        generator = None
        if self.generator is not None:
            shift = (depth - self.depth) % len(self.generator.patterns)
            patterns = self.generator.patterns[shift:] + self.generator.patterns[:shift]
            generator = DiagramGenerator(kind=self.generator.kind, patterns=patterns)
        return Diagram(vertex_counts=tuple(counts), edges=tuple(edges), generator=generator)

    def truncated(self, depth: int) -> "Diagram":
        """The first ``depth`` levels without a generator"""
        wide = self.extended(depth)
        return Diagram(
            vertex_counts=wide.vertex_counts[: depth + 1], edges=wide.edges[:depth]
        )


class IncidenceMatrix(BaseModel):
    """a_{ik} = number of edges from v_k(n-1) to v_i(n)"""

    model_config = ConfigDict(frozen=True)

    level: int
    rows: Tuple[Tuple[int, ...], ...]

    @classmethod
    def from_sympy(cls, level: int, matrix: sympy.Matrix) -> "IncidenceMatrix":
        return cls(
            level=level,
            rows=tuple(tuple(int(matrix[i, k]) for k in range(matrix.cols)) for i in range(matrix.rows)),
        )

    def as_sympy(self) -> sympy.Matrix:
        return sympy.Matrix([list(row) for row in self.rows])

    @property
    def row_sums(self) -> Tuple[int, ...]:
        return tuple(sum(row) for row in self.rows)

    @property
    def columns_nonzero(self) -> bool:
        if not self.rows:
            return False
        return all(any(row[k] for row in self.rows) for k in range(len(self.rows[0])))


class SpecialLevel(BaseModel):
    """Block structure of one level of a special diagram"""

    model_config = ConfigDict(frozen=True)

    level: int = Field(ge=1)
    zero: Tuple[int, ...] = Field(description="Vertices of the fan-in part of the own block")
    one: Tuple[int, ...] = Field(default=(), description="Single-edge part of the own block")
    blocks: Dict[int, Tuple[int, ...]] = Field(
        default_factory=dict, description="Forward blocks keyed by their index j > level"
    )

    @property
    def own(self) -> Tuple[int, ...]:
        return self.zero + self.one

    def block(self, j: int) -> Tuple[int, ...]:
        if j == self.level:
            return self.own
        return self.blocks.get(j, ())

    def all_blocks(self) -> Dict[int, Tuple[int, ...]]:
        return {self.level: self.own, **self.blocks}

    def block_of(self, v: int) -> Optional[int]:
        for j, members in self.all_blocks().items():
            if v in members:
                return j
        return None

    def __hash__(self) -> int:
        return hash((self.level, self.zero, self.one, tuple(sorted(self.blocks.items()))))


class SpecialDiagramSpec(BaseModel):
    """Block partitions of V_1 .. V_N"""

    model_config = ConfigDict(frozen=True)

    levels: Tuple[SpecialLevel, ...]

    def at(self, n: int) -> SpecialLevel:
        for level in self.levels:
            if level.level == n:
                return level
        raise LevelOutOfRangeError(f"No block structure for level {n}")

    @property
    def depth(self) -> int:
        return max((level.level for level in self.levels), default=0)


class Defect(BaseModel):
    """One violated clause with its coordinates"""

    model_config = ConfigDict(frozen=True)

    clause: str
    level: int
    vertex: Optional[int] = None
    message: str

    def __str__(self) -> str:
        where = f"level {self.level}" + (f" vertex {self.vertex}" if self.vertex is not None else "")
        return f"[{self.clause}] {where}: {self.message}"


class ValidationReport(BaseModel):
    """Defects found up to a truncation level; empty iff valid"""

    model_config = ConfigDict(frozen=True)

    up_to_level: int
    defects: Tuple[Defect, ...] = ()

    @property
    def is_valid(self) -> bool:
        return not self.defects

    @property
    def clauses(self) -> List[str]:
        return sorted({d.clause for d in self.defects})
