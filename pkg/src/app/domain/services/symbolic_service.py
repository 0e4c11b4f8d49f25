"""Symbolic core: composition, inversion, difference sets and measures of rule tables."""

import logging
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from ..entities.cylmap import (
    CylMap,
    DiffClassification,
    LazyExpansion,
    PiecewisePower,
    Rule,
)
from ..entities.measures import MeasureSpec
from ..entities.symbolic import CylinderUnion, Point, SeqSpace
from ..interfaces.events import EventPublisher
from ..models.errors import BudgetExceededError, DepthOverflowError, UnresolvedError
from ..models.value_objects import Budgets, CellClass, Word

logger = logging.getLogger(__name__)


class SymbolicService:
    """Domain service for the group of rule-table automorphisms."""

    def __init__(
        self,
        budgets: Optional[Budgets] = None,
        event_publisher: Optional[EventPublisher] = None,
    ):
        self.budgets = budgets or Budgets()
        self._event_publisher = event_publisher
        logger.info(f"Symbolic service initialized (rule_budget={self.budgets.rule_budget})")

    # -- tables ----------------------------------------------------------

    def normalize(self, T: CylMap) -> CylMap:
        """Merge complete sibling families ``p·a -> q·a`` sharing one addend."""
        space = T.space
        table: Dict[Word, Tuple[Word, Point]] = {r.source: (r.target, r.addend) for r in T.rules}
        changed = True
        while changed:
            changed = False
            parents = sorted({w[:-1] for w in table if w}, key=len, reverse=True)
            for parent in parents:
                children = space.children(parent)
                if not all(child in table for child in children):
                    continue
                targets = [table[child][0] for child in children]
                addends = {table[child][1] for child in children}
                prefix = targets[0][:-1]
                if len(addends) != 1 or any(
                    t[:-1] != prefix or t[-1] != child[-1] for t, child in zip(targets, children)
                ):
                    continue
                for child in children:
                    del table[child]
                table[parent] = (prefix, addends.pop())
                changed = True
                break
        rules = tuple(
            Rule(source=source, target=target, addend=addend)
            for source, (target, addend) in sorted(table.items())
        )
        return CylMap(space=space, rules=rules)

    def translation(self, space: SeqSpace, addend: Point) -> CylMap:
        """x ↦ x + b as a single lazy rule"""
        space.validate_point(addend)
        return CylMap(space=space, rules=(Rule(source=(), target=(), addend=addend),))

    def compose(self, S: CylMap, T: CylMap) -> CylMap:
        """The table of S∘T (T applied first)."""
        S.space.ensure_same(T.space)
        space = S.space
        rules: List[Rule] = []
        stack: List[Word] = [()]
        while stack:
            word = stack.pop()
            ran_t = T.run(word)
            if ran_t is not None:
                middle, residual_t = ran_t
                ran_s = S.run(middle)
                if ran_s is not None:
                    out, residual_s = ran_s
                    rules.append(
                        Rule(source=word, target=out, addend=space.add(residual_t, residual_s))
                    )
                    if len(rules) > self.budgets.rule_budget:
                        raise DepthOverflowError(
                            f"Composite table exceeds the rule budget of {self.budgets.rule_budget}"
                        )
                    continue
            stack.extend(reversed(space.children(word)))
        return self.normalize(CylMap(space=space, rules=tuple(rules)))

    def invert(self, T: CylMap) -> CylMap:
        space = T.space
        rules = tuple(
            Rule(
                source=r.target,
                target=r.source,
                addend=space.negate(r.addend, len(r.source)),
            )
            for r in T.rules
        )
        return self.normalize(CylMap(space=space, rules=rules))

    def power(self, T: CylMap, exponent: int) -> CylMap:
        """T^e for any integer e by repeated squaring"""
        if exponent < 0:
            return self.power(self.invert(T), -exponent)
        result = CylMap.identity(T.space)
        base = T
        while exponent:
            if exponent & 1:
                result = self.compose(base, result)
            exponent >>= 1
            if exponent:
                base = self.compose(base, base)
        return result

    def equivalent(self, S: CylMap, T: CylMap) -> bool:
        """Equality as maps, decided on the common refinement of both tables"""
        S.space.ensure_same(T.space)
        return all(self._compare(S, T, leaf) == CellClass.EQUAL for leaf in self.leaves([S, T]))

    # -- pointwise and set images ------------------------------------------

    def apply_point(self, T: CylMap, x: Point) -> Point:
        T.space.validate_point(x)
        rule = T.rule_for_point(x)
        tail = x.truncate_below(len(rule.source))
        moved = T.space.add(tail, rule.addend)
        return moved.with_prefix(rule.target)

    def leaves(self, maps: Sequence[CylMap], root: Word = ()) -> Iterator[Word]:
        """Words under ``root`` refined until every map resolves, in lexicographic order"""
        space = maps[0].space
        stack = [root]
        emitted = 0
        while stack:
            word = stack.pop()
            if all(m.rule_for(word) is not None for m in maps):
                emitted += 1
                if emitted > self.budgets.rule_budget:
                    raise DepthOverflowError("Common refinement exceeds the rule budget")
                yield word
                continue
            stack.extend(reversed(space.children(word)))

    def image(self, T: CylMap, A: CylinderUnion) -> CylinderUnion:
        """T(A) for a cylinder union; images of cylinders are exact cylinders."""
        T.space.ensure_same(A.space)
        cells: List[Word] = []
        for word in A.words:
            for leaf in self.leaves([T], root=word):
                out, _ = T.run(leaf)
                cells.append(out)
        points = tuple(self.apply_point(T, p) for p in A.points)
        return CylinderUnion(
            space=T.space, words=tuple(sorted(cells)), points=points
        ).normalized()

    def cell_permutation(self, T: CylMap, depth: int) -> Dict[Word, Tuple[Word, Point]]:
        """T on depth-d cells: image cell and residual tail addend"""
        if depth < T.table_depth:
            raise UnresolvedError(
                f"Depth {depth} is below the table depth {T.table_depth}"
            )
        return {word: T.run(word) for word in T.space.words(depth)}

    # -- lazy enumeration -------------------------------------------------

    def rules_at(self, T: CylMap, depth: int) -> LazyExpansion:
        """Pure prefix rewrites up to ``depth``; carrying words at ``depth`` are unresolved"""
        rules: List[Tuple[Word, Word]] = []
        unresolved: List[Word] = []
        stack: List[Word] = [()]
        while stack:
            word = stack.pop()
            ran = T.run(word)
            if ran is not None and ran[1].is_zero:
                rules.append((word, ran[0]))
            elif len(word) >= depth:
                unresolved.append(word)
            else:
                stack.extend(reversed(T.space.children(word)))
            if len(rules) + len(unresolved) > self.budgets.rule_budget:
                raise DepthOverflowError("Lazy expansion exceeds the rule budget")
        return LazyExpansion(depth=depth, rules=tuple(sorted(rules)), unresolved=tuple(sorted(unresolved)))

    def exceptional_points(
        self, T: CylMap, depth_budget: Optional[int] = None
    ) -> List[Tuple[Point, Point]]:
        """Points on which the lazy expansion never settles, with their images."""
        space = T.space
        budget = depth_budget or self.budgets.depth_budget
        found: List[Tuple[Point, Point]] = []
        for rule in T.lazy_rules():
            stack = [rule.source]
            while stack:
                word = stack.pop()
                _, residual = rule.apply_to_word(space, word)
                k = len(word)
                if residual.is_zero:
                    continue
                if residual == Point.unit(k):
                    x = space.max_point(k).with_prefix(word)
                elif residual == space.max_point(k):
                    x = Point.zero().with_prefix(word)
                else:
                    if k - len(rule.source) >= budget:
                        raise BudgetExceededError(
                            f"Carries of addend {rule.addend} do not settle within {budget} digits"
                        )
                    stack.extend(space.children(word))
                    continue
                found.append((x, self.apply_point(T, x)))
        return sorted(found, key=lambda pair: (pair[0].head, pair[0].period))

    # -- difference sets ----------------------------------------------------

    def _compare(self, S: CylMap, T: CylMap, word: Word) -> CellClass:
        out_s, residual_s = S.run(word)
        out_t, residual_t = T.run(word)
        if out_s == out_t and residual_s == residual_t:
            return CellClass.EQUAL
        return CellClass.DIFFERENT

    def classify_cell(self, S: CylMap, T: CylMap, cell: Word) -> CellClass:
        seen = set()
        for leaf in self.leaves([S, T], root=cell):
            seen.add(self._compare(S, T, leaf))
            if len(seen) > 1:
                return CellClass.UNRESOLVED
        return seen.pop()

    def diff_set(self, S: CylMap, T: CylMap, depth: int) -> DiffClassification:
        """Depth-d cylinders where S and T agree, disagree everywhere, or both"""
        S.space.ensure_same(T.space)
        if depth < 0:
            raise ValueError("Depth must be non-negative")
        buckets: Dict[CellClass, List[Word]] = {c: [] for c in CellClass}
        for cell in S.space.words(depth):
            buckets[self.classify_cell(S, T, cell)].append(cell)
        return DiffClassification(
            space=S.space,
            depth=depth,
            equal=tuple(buckets[CellClass.EQUAL]),
            different=tuple(buckets[CellClass.DIFFERENT]),
            unresolved=tuple(buckets[CellClass.UNRESOLVED]),
        )

    def e_set(self, S: CylMap, T: CylMap, depth: int) -> DiffClassification:
        """Classification for E(S,T): forward or inverse disagreement"""
        forward = self.diff_set(S, T, depth)
        backward = self.diff_set(self.invert(S), self.invert(T), depth)
        equal, different, unresolved = [], [], []
        for cell in S.space.words(depth):
            pair = {forward.class_of(cell), backward.class_of(cell)}
            if "different" in pair:
                different.append(cell)
            elif pair == {"equal"}:
                equal.append(cell)
            else:
                unresolved.append(cell)
        return DiffClassification(
            space=S.space,
            depth=depth,
            equal=tuple(equal),
            different=tuple(different),
            unresolved=tuple(unresolved),
        )

    def forward_difference(self, S: CylMap, T: CylMap) -> CylinderUnion:
        """The exact set E₀(S,T) = {x : Sx ≠ Tx} as a cylinder union"""
        S.space.ensure_same(T.space)
        words = [
            leaf
            for leaf in self.leaves([S, T])
            if self._compare(S, T, leaf) == CellClass.DIFFERENT
        ]
        return CylinderUnion.from_cells(S.space, words)

    # -- measures -------------------------------------------------------------

    def measure(self, mu: MeasureSpec, A: CylinderUnion) -> Fraction:
        """Exact μ(A) for a union of pairwise disjoint cylinders and points"""
        mu.space.ensure_same(A.space)
        A.ensure_disjoint()
        total = sum((mu.cylinder_mass(w) for w in A.words), Fraction(0))
        for point in set(A.points):
            if not A.covers_point(point):
                total += mu.point_mass(point)
        return total

    def pushforward_measure(self, mu: MeasureSpec, S: CylMap, A: CylinderUnion) -> Fraction:
        """μ∘S(A) = μ(SA)"""
        return self.measure(mu, self.image(S, A))

    # -- full group ---------------------------------------------------------

    def piecewise(self, T: CylMap, pieces: Sequence[Tuple[Word, int]]) -> PiecewisePower:
        return PiecewisePower(base_map=T, pieces=tuple(pieces))

    def to_cylmap(self, element: PiecewisePower) -> CylMap:
        """Rule table of a piecewise power; raises BijectivityError if pieces collide"""
        T = element.base_map
        powers: Dict[int, CylMap] = {}
        rules: List[Rule] = []
        for word, exponent in element.pieces:
            if exponent not in powers:
                powers[exponent] = self.power(T, exponent)
            power = powers[exponent]
            for leaf in self.leaves([power], root=word):
                out, residual = power.run(leaf)
                rules.append(Rule(source=leaf, target=out, addend=residual))
        return self.normalize(CylMap(space=T.space, rules=tuple(rules)))
