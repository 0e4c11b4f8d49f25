"""Finite and infinite paths in ordered Bratteli diagrams."""

from typing import Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator
from typing_extensions import Annotated, Literal

from ..models.errors import BudgetExceededError
from .bratteli import Diagram, Edge
from .symbolic import Point


class PathPrefix(BaseModel):
    """Edges e_1 .. e_n with s(e_1) = v_0 and s(e_{i+1}) = r(e_i)"""

    model_config = ConfigDict(frozen=True)

    edges: Tuple[Edge, ...] = ()

    @model_validator(mode="after")
    def _edges_are_adjacent(self) -> "PathPrefix":
        for n, edge in enumerate(self.edges, start=1):
            if edge.level != n:
                raise ValueError(f"Edge {n} of the path sits at level {edge.level}")
            if n == 1 and edge.source != 0:
                raise ValueError("A path starts at the root")
            if n > 1 and edge.source != self.edges[n - 2].target:
                raise ValueError(f"Edges {n - 1} and {n} are not adjacent")
        return self

    @property
    def length(self) -> int:
        return len(self.edges)

    @property
    def terminal(self) -> int:
        """r(e_n); the root for the empty path"""
        return self.edges[-1].target if self.edges else 0

    @property
    def labels(self) -> Tuple[int, ...]:
        return tuple(e.rank for e in self.edges)

    @property
    def vertices(self) -> Tuple[int, ...]:
        return tuple(e.target for e in self.edges)

    def truncate(self, n: int) -> "PathPrefix":
        return PathPrefix(edges=self.edges[:n])

    def text(self, with_vertices: bool = False) -> str:
        labels = ",".join(str(label) for label in self.labels)
        if with_vertices:
            return labels + "@" + ".".join(str(v) for v in self.vertices)
        return labels


class DigitTail(BaseModel):
    """At level n pick the ``x_{n-1}``-th outgoing edge (mod the fan-out)"""

    model_config = ConfigDict(frozen=True)

    kind: Literal["digits"] = "digits"
    point: Point = Point.zero()

    def next_edge(self, diagram: Diagram, level: int, source: int) -> Edge:
        choices = diagram.outgoing(level - 1, source)
        if not choices:
            raise BudgetExceededError(f"Vertex {source} at level {level - 1} has no way out")
        return choices[self.point.digit(level - 1) % len(choices)]


class ExtremeTail(BaseModel):
    """Follow the least (or greatest) ranked outgoing edge from every vertex"""

    model_config = ConfigDict(frozen=True)

    kind: Literal["extreme"] = "extreme"
    greatest: bool = False

    def next_edge(self, diagram: Diagram, level: int, source: int) -> Edge:
        choices = diagram.outgoing(level - 1, source)
        if not choices:
            raise BudgetExceededError(f"Vertex {source} at level {level - 1} has no way out")
        key = (lambda e: (e.rank, e.target))
        return max(choices, key=key) if self.greatest else min(choices, key=key)


TailGenerator = Annotated[Union[DigitTail, ExtremeTail], Field(discriminator="kind")]


class LazyPath(BaseModel):
    """An infinite path: a materialized head followed by a stateless tail rule.

    The tail picks e_{n+1} from (n+1, r(e_n)) only, so paths that agree on a
    vertex at some level share everything generated after it.
    """

    model_config = ConfigDict(frozen=True)

    diagram: Diagram
    head: PathPrefix = PathPrefix()
    tail: TailGenerator = DigitTail()
    depth_budget: int = Field(default=256, gt=0)

    def edges(self, n: int) -> Tuple[Edge, ...]:
        """The first ``n`` edges"""
        out = list(self.head.edges[:n])
        vertex = out[-1].target if out else 0
        for level in range(len(out) + 1, n + 1):
            edge = self.tail.next_edge(self.diagram, level, vertex)
            out.append(edge)
            vertex = edge.target
        return tuple(out)

    def prefix(self, n: int) -> PathPrefix:
        return PathPrefix(edges=self.edges(n))

    def with_head(self, head: Tuple[Edge, ...]) -> "LazyPath":
        return self.model_copy(update={"head": PathPrefix(edges=head)})


class PathCoord(BaseModel):
    """Pairs (i_n, v_n): rank of the level-n prefix and its terminal vertex"""

    model_config = ConfigDict(frozen=True)

    pairs: Tuple[Tuple[int, int], ...]

    @property
    def ranks(self) -> Tuple[int, ...]:
        return tuple(i for i, _ in self.pairs)

    @property
    def vertices(self) -> Tuple[int, ...]:
        return tuple(v for _, v in self.pairs)
