"""Seeded sampling of points, maps and diagrams for property checks."""

import logging
import random
from typing import List, Optional

from ..entities.bratteli import Diagram, Edge
from ..entities.cylmap import CylMap, Rule
from ..entities.paths import DigitTail, LazyPath
from ..entities.symbolic import Point, SeqSpace

logger = logging.getLogger(__name__)


class SamplingService:
    """Reproducible random inputs; every draw goes through ``random.Random(seed)``."""

    def __init__(self, seed: int = 0):
        self.seed = seed
        logger.info(f"Sampling service initialized (seed={seed})")

    def rng(self, salt: int = 0) -> random.Random:
        return random.Random(self.seed * 7919 + salt)

    def point(
        self, rng: random.Random, space: SeqSpace, head_length: int = 8, max_period: int = 3
    ) -> Point:
        head = [rng.randrange(space.size(t)) for t in range(head_length)]
        # a period over the full alphabet cycle keeps digits in bounds
        cycle = len(space.period) * rng.randint(1, max_period)
        start = max(head_length, len(space.head))
        head += [rng.randrange(space.size(t)) for t in range(head_length, start)]
        period = [rng.randrange(space.size(t)) for t in range(start, start + cycle)]
        return Point(head=tuple(head), period=tuple(period))

    def points(self, space: SeqSpace, count: int, head_length: int = 8, salt: int = 0) -> List[Point]:
        rng = self.rng(salt)
        return [self.point(rng, space, head_length) for _ in range(count)]

    def cylmap(
        self, rng: random.Random, space: SeqSpace, depth: int, lazy: bool = False
    ) -> CylMap:
        """A random permutation of the depth-d cells, optionally with tail carries"""
        cells = list(space.words(depth))
        images = cells[:]
        rng.shuffle(images)
        rules = []
        for source, target in zip(cells, images):
            addend = Point.zero()
            if lazy and rng.random() < 0.5:
                addend = Point.unit(depth, rng.randrange(1, space.size(depth)))
            rules.append(Rule(source=source, target=target, addend=addend))
        return CylMap(space=space, rules=tuple(rules))

    def diagram(
        self,
        rng: random.Random,
        levels: int = 3,
        max_vertices: int = 4,
        max_parallel: int = 3,
    ) -> Diagram:
        """A valid ordered diagram: every vertex has incoming and outgoing edges"""
        counts = [1] + [rng.randint(1, max_vertices) for _ in range(levels)]
        edges: List[Edge] = []
        for n in range(1, levels + 1):
            pairs = []
            fed = set()
            for v in range(counts[n]):
                sources = rng.sample(range(counts[n - 1]), rng.randint(1, counts[n - 1]))
                for s in sources:
                    pairs.extend([(s, v)] * rng.randint(1, max_parallel))
                    fed.add(s)
            for s in range(counts[n - 1]):
                if s not in fed:
                    pairs.append((s, rng.randrange(counts[n])))
            for v in range(counts[n]):
                incoming = [p for p in pairs if p[1] == v]
                rng.shuffle(incoming)
                edges.extend(
                    Edge(level=n, source=s, target=v, rank=r) for r, (s, _) in enumerate(incoming)
                )
        return Diagram.from_edges(counts, [(e.level, e.source, e.target, e.rank) for e in edges])

    def lazy_path(
        self,
        rng: random.Random,
        diagram: Diagram,
        head_length: int,
        depth_budget: int = 256,
        space: Optional[SeqSpace] = None,
    ) -> LazyPath:
        """A path whose edges are chosen by the digits of a random point"""
        space = space or SeqSpace.constant(max(2, max(diagram.vertex_counts) * 3))
        point = self.point(rng, space, head_length)
        tail = DigitTail(point=point)
        path = LazyPath(diagram=diagram, tail=tail, depth_budget=depth_budget)
        if not diagram.is_infinite:
            head_length = min(head_length, diagram.depth)
        return path.with_head(path.edges(head_length))
