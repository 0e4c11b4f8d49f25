"""Vershik domain service: lexicographic ranks and the successor map on path spaces."""

import logging
from typing import Iterator, List, Optional, Sequence, Tuple

from ..entities.bratteli import Diagram, Edge
from ..entities.paths import LazyPath, PathCoord, PathPrefix
from ..models.errors import BudgetExceededError, IndexOutOfRangeError, VertexNotFoundError

logger = logging.getLogger(__name__)


class VershikService:
    """Domain service for ranks, heights and the Vershik map."""

    def __init__(self):
        logger.info("Vershik service initialized")

    # -- heights ---------------------------------------------------------

    def height(self, D: Diagram, n: int, v: int) -> int:
        """h(n, v): number of paths from the root to v"""
        if n < 0:
            raise VertexNotFoundError(f"No level {n}")
        D.ensure_vertex(n, v)
        return D.heights(n)[v]

    def enumerate_paths(self, D: Diagram, n: int, v: int) -> Iterator[PathPrefix]:
        """All paths into (n, v) in lexicographic order, by direct recursion"""
        D.ensure_vertex(n, v)

        def walk(level: int, vertex: int) -> Iterator[Tuple[Edge, ...]]:
            if level == 0:
                yield ()
                return
            for edge in D.incoming(level, vertex):
                for below in walk(level - 1, edge.source):
                    yield below + (edge,)

        for edges in walk(n, v):
            yield PathPrefix(edges=edges)

    # -- ranks -------------------------------------------------------------

    def rank(self, D: Diagram, p: PathPrefix) -> int:
        """Position of ``p`` among the paths into its terminal vertex"""
        total = 0
        for n, edge in enumerate(p.edges, start=1):
            below = D.heights(n - 1)
            for f in D.incoming(n, edge.target):
                if f.rank >= edge.rank:
                    break
                total += below[f.source]
        return total

    def unrank(self, D: Diagram, n: int, v: int, i: int) -> PathPrefix:
        h = self.height(D, n, v)
        if not 0 <= i < h:
            raise IndexOutOfRangeError(f"Rank {i} outside [0, {h}) at level {n} vertex {v}")
        edges: List[Edge] = []
        for level in range(n, 0, -1):
            below = D.heights(level - 1)
            for f in D.incoming(level, v):
                if i < below[f.source]:
                    edges.append(f)
                    v = f.source
                    break
                i -= below[f.source]
        return PathPrefix(edges=tuple(reversed(edges)))

    def minimal_path(self, D: Diagram, n: int, v: int) -> PathPrefix:
        return self.unrank(D, n, v, 0)

    def maximal_path(self, D: Diagram, n: int, v: int) -> PathPrefix:
        return self.unrank(D, n, v, self.height(D, n, v) - 1)

    def is_maximal_edge(self, D: Diagram, edge: Edge) -> bool:
        return edge.rank == len(D.incoming(edge.level, edge.target)) - 1

    def is_minimal_edge(self, edge: Edge) -> bool:
        return edge.rank == 0

    # -- Vershik map -------------------------------------------------------

    def _first_movable(self, y: LazyPath, forward: bool) -> Tuple[Tuple[Edge, ...], int]:
        """Edges up to the least level whose edge is not maximal (or not minimal)"""
        D = y.diagram
        edges: List[Edge] = []
        vertex = 0
        for level in range(1, y.depth_budget + 1):
            if level <= y.head.length:
                edge = y.head.edges[level - 1]
            else:
                edge = y.tail.next_edge(D, level, vertex)
            edges.append(edge)
            vertex = edge.target
            stuck = self.is_maximal_edge(D, edge) if forward else self.is_minimal_edge(edge)
            if not stuck:
                return tuple(edges), level
        direction = "maximal" if forward else "minimal"
        raise BudgetExceededError(
            f"Every edge of the first {y.depth_budget} levels is {direction}"
        )

    def _step(self, y: LazyPath, forward: bool) -> LazyPath:
        D = y.diagram
        edges, k = self._first_movable(y, forward)
        e_k = edges[-1]
        siblings = D.incoming(k, e_k.target)
        f_k = siblings[e_k.rank + 1] if forward else siblings[e_k.rank - 1]
        if forward:
            below = self.minimal_path(D, k - 1, f_k.source)
        else:
            below = self.maximal_path(D, k - 1, f_k.source)
        head = below.edges + (f_k,) + y.head.edges[k:]
        logger.debug(f"{'Successor' if forward else 'Predecessor'} moved level {k}")
        return y.with_head(head)

    def successor(self, y: LazyPath) -> LazyPath:
        """Replace the least non-maximal edge by its order successor"""
        return self._step(y, forward=True)

    def predecessor(self, y: LazyPath) -> LazyPath:
        """Replace the least non-minimal edge by its order predecessor"""
        return self._step(y, forward=False)

    def switch_level(self, y: LazyPath) -> int:
        """Level k at which the successor changes the path"""
        return self._first_movable(y, forward=True)[1]

    def coords(self, y: LazyPath, N: int) -> PathCoord:
        """(i_n, v_n) for n = 1..N"""
        if N > y.depth_budget:
            raise BudgetExceededError(f"Depth {N} exceeds the path budget {y.depth_budget}")
        prefix = y.prefix(N)
        pairs = tuple(
            (self.rank(y.diagram, prefix.truncate(n)), prefix.edges[n - 1].target)
            for n in range(1, N + 1)
        )
        return PathCoord(pairs=pairs)

    # -- helpers -----------------------------------------------------------

    def path_from_labels(
        self, D: Diagram, labels: Sequence[int], vertices: Optional[Sequence[int]] = None
    ) -> PathPrefix:
        """Resolve order labels (and optionally terminal vertices) into edges"""
        edges: List[Edge] = []
        vertex = 0
        for n, label in enumerate(labels, start=1):
            candidates = [
                e
                for e in D.outgoing(n - 1, vertex)
                if e.rank == label and (vertices is None or e.target == vertices[n - 1])
            ]
            if len(candidates) != 1:
                problem = "ambiguous" if candidates else "unknown"
                raise VertexNotFoundError(
                    f"Label {label} at level {n} from vertex {vertex} is {problem}"
                )
            edges.append(candidates[0])
            vertex = candidates[0].target
        return PathPrefix(edges=tuple(edges))
