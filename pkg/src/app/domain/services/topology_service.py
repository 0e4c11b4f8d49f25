"""Topology domain service: neighborhoods and distances between rule-table automorphisms."""

import logging
from fractions import Fraction
from itertools import combinations
from math import lcm
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from ..entities.cylmap import CylMap
from ..entities.measures import Atomic, Bernoulli, MeasureSpec
from ..entities.symbolic import CylinderUnion, Point, SeqSpace, merge_cells
from ..entities.topology import DistanceRow, NbhdSpec, SeparationReport, SymdiffBound
from ..interfaces.events import EventPublisher
from ..models.errors import BudgetExceededError, DepthOverflowError, DuplicateWeightError
from ..models.value_objects import Budgets, Interval, Verdict, Word
from ...utils.trace_logger import trace_operation
from .symbolic_service import SymbolicService
from .tower_service import TowerService

logger = logging.getLogger(__name__)


def _combine(verdicts: Iterable[Verdict]) -> Verdict:
    seen = set(verdicts)
    if Verdict.NO in seen:
        return Verdict.NO
    if Verdict.UNKNOWN in seen:
        return Verdict.UNKNOWN
    return Verdict.YES


class TopologyService:
    """Domain service evaluating neighborhood predicates and distances."""

    def __init__(
        self,
        symbolic_service: Optional[SymbolicService] = None,
        budgets: Optional[Budgets] = None,
        event_publisher: Optional[EventPublisher] = None,
    ):
        self.budgets = budgets or (symbolic_service.budgets if symbolic_service else Budgets())
        self.symbolic = symbolic_service or SymbolicService(budgets=self.budgets)
        self._event_publisher = event_publisher
        logger.info(f"Topology service initialized (search_cap={self.budgets.search_cap})")

    def _same_space(self, S: CylMap, T: CylMap, *measures: MeasureSpec) -> SeqSpace:
        S.space.ensure_same(T.space)
        for mu in measures:
            S.space.ensure_same(mu.space)
        return S.space

    def _mass(self, mu: MeasureSpec, cells: Iterable[Word]) -> Fraction:
        return self.symbolic.measure(mu, CylinderUnion.from_cells(mu.space, cells))

    # -- uniform distance --------------------------------------------------

    def dist_uniform(self, S: CylMap, T: CylMap, mu: MeasureSpec, depth: int = 0) -> Interval:
        """Bounds for μ(E(S,T)) from the depth-d classification of E"""
        self._same_space(S, T, mu)
        classes = self.symbolic.e_set(S, T, depth)
        lo = self._mass(mu, classes.different)
        hi = lo + self._mass(mu, classes.unresolved)
        return Interval(lo=lo, hi=hi)

    # -- set differences -----------------------------------------------------

    def _cell_images(self, T: CylMap, depth: int) -> Dict[Word, Word]:
        if T.space.cell_count(depth) > self.budgets.rule_budget:
            raise DepthOverflowError(f"Depth {depth} exceeds the rule budget")
        return {cell: image for cell, (image, _) in self.symbolic.cell_permutation(T, depth).items()}

    @trace_operation("sup_symdiff")
    def sup_symdiff(self, S: CylMap, T: CylMap, mu: MeasureSpec, depth: int = 0) -> SymdiffBound:
        """Lower bound max_F μ(TF Δ SF) over unions of cells, upper bound μ(TE₀) + μ(SE₀).

        Only cells that the two maps send to different cells matter; up to
        ``search_cap`` of them every union is tried, beyond that a greedy
        ascent with restarts gives a lower bound only.
        """
        space = self._same_space(S, T, mu)
        E0 = self.symbolic.forward_difference(S, T)
        upper = self.symbolic.measure(mu, self.symbolic.image(T, E0)) + self.symbolic.measure(
            mu, self.symbolic.image(S, E0)
        )

        d = max(depth, S.table_depth, T.table_depth)
        s_images = self._cell_images(S, d)
        t_images = self._cell_images(T, d)
        active = sorted(c for c in s_images if s_images[c] != t_images[c])
        touched = {t_images[c] for c in active} | {s_images[c] for c in active}
        masses = {z: mu.cylinder_mass(z) for z in touched}
        scale = lcm(*(m.denominator for m in masses.values())) if masses else 1
        weight = {z: int(m * scale) for z, m in masses.items()}

        if len(active) <= self.budgets.search_cap:
            best, chosen = self._exhaustive(active, s_images, t_images, weight)
            exhaustive = True
        else:
            best, chosen = self._greedy(active, s_images, t_images, weight)
            exhaustive = False
            logger.info(f"{len(active)} active cells exceed the search cap; greedy lower bound only")

        return SymdiffBound(
            lower=Fraction(best, scale),
            upper=upper,
            witness=CylinderUnion.from_cells(space, chosen),
            exhaustive=exhaustive,
            active=len(active),
        )

    def _exhaustive(
        self,
        active: List[Word],
        s_images: Dict[Word, Word],
        t_images: Dict[Word, Word],
        weight: Dict[Word, int],
    ) -> Tuple[int, List[Word]]:
        """Walk every subset in Gray-code order, one toggled cell per step"""
        in_t: Dict[Word, bool] = {}
        in_s: Dict[Word, bool] = {}

        def part(z: Word) -> int:
            return weight[z] if in_t.get(z, False) != in_s.get(z, False) else 0

        total = best = 0
        mask = best_mask = 0
        for i in range(1, 1 << len(active)):
            bit = (i & -i).bit_length() - 1
            cell = active[bit]
            mask ^= 1 << bit
            zt, zs = t_images[cell], s_images[cell]
            total -= part(zt) + part(zs)
            in_t[zt] = not in_t.get(zt, False)
            in_s[zs] = not in_s.get(zs, False)
            total += part(zt) + part(zs)
            if total > best:
                best, best_mask = total, mask
        return best, [c for k, c in enumerate(active) if best_mask >> k & 1]

    def _value(
        self, F: Set[Word], s_images: Dict[Word, Word], t_images: Dict[Word, Word], weight: Dict[Word, int]
    ) -> int:
        forward = {t_images[c] for c in F}
        backward = {s_images[c] for c in F}
        return sum(weight[z] for z in forward ^ backward)

    def _greedy(
        self,
        active: List[Word],
        s_images: Dict[Word, Word],
        t_images: Dict[Word, Word],
        weight: Dict[Word, int],
    ) -> Tuple[int, List[Word]]:
        best, best_set = 0, set()
        starts = sorted(active, key=lambda c: -weight[t_images[c]])[: self.budgets.search_cap]
        for start in starts:
            current = {start}
            value = self._value(current, s_images, t_images, weight)
            improved = True
            while improved:
                improved = False
                for cell in active:
                    trial = current ^ {cell}
                    trial_value = self._value(trial, s_images, t_images, weight)
                    if trial_value > value:
                        current, value, improved = trial, trial_value, True
            if value > best:
                best, best_set = value, current
        return best, sorted(best_set)

    def sup_abs_diff(self, S: CylMap, T: CylMap, mu: MeasureSpec, depth: int = 0) -> Fraction:
        """Σ_c max(0, μ(Tc) − μ(Sc)) over depth-d cells; nondecreasing in d"""
        space = self._same_space(S, T, mu)
        total = Fraction(0)
        for cell in space.words(depth):
            A = CylinderUnion.of(space, cell)
            gap = self.symbolic.measure(mu, self.symbolic.image(T, A)) - self.symbolic.measure(
                mu, self.symbolic.image(S, A)
            )
            total += max(Fraction(0), gap)
        return total

    def _abs_diff_exact(self, S: CylMap, T: CylMap, mu: MeasureSpec, depth: int) -> bool:
        """Whether both push-forwards have constant density on depth-d cells"""
        if not isinstance(mu, Bernoulli) or depth < max(S.table_depth, T.table_depth):
            return False
        if not S.is_lazy and not T.is_lazy:
            return True
        return mu.is_uniform

    def _symdiff_mass(self, mu: MeasureSpec, A: CylinderUnion, B: CylinderUnion) -> Fraction:
        d = max(A.max_length, B.max_length)
        cells = A.cells(d) ^ B.cells(d)
        points = [p for p in A.points if not B.contains_point(p)]
        points += [p for p in B.points if not A.contains_point(p)]
        union = CylinderUnion(space=A.space, words=merge_cells(A.space, cells), points=tuple(points))
        return self.symbolic.measure(mu, union.normalized())

    def in_W(self, S: CylMap, T: CylMap, sets: Sequence[CylinderUnion]) -> Verdict:
        """SF = TF for every listed F"""
        self._same_space(S, T)
        try:
            for F in sets:
                if self.symbolic.image(S, F) != self.symbolic.image(T, F):
                    return Verdict.NO
        except (DepthOverflowError, BudgetExceededError) as e:
            logger.warning(f"W membership left open: {e}")
            return Verdict.UNKNOWN
        return Verdict.YES

    def wbar_sum(self, S: CylMap, T: CylMap, F: CylinderUnion, mu: MeasureSpec) -> Fraction:
        """μ(SF Δ TF) + μ(S⁻¹F Δ T⁻¹F)"""
        forward = self._symdiff_mass(mu, self.symbolic.image(S, F), self.symbolic.image(T, F))
        S_inv, T_inv = self.symbolic.invert(S), self.symbolic.invert(T)
        backward = self._symdiff_mass(mu, self.symbolic.image(S_inv, F), self.symbolic.image(T_inv, F))
        return forward + backward

    def in_Wbar(
        self,
        S: CylMap,
        T: CylMap,
        sets: Sequence[CylinderUnion],
        measures: Sequence[MeasureSpec],
        eps: Fraction,
    ) -> Verdict:
        self._same_space(S, T, *measures)
        try:
            for F in sets:
                for mu in measures:
                    if self.wbar_sum(S, T, F, mu) >= eps:
                        return Verdict.NO
        except (DepthOverflowError, BudgetExceededError) as e:
            logger.warning(f"Wbar membership left open: {e}")
            return Verdict.UNKNOWN
        return Verdict.YES

    # -- adic distance ---------------------------------------------------------

    def _sup_gap(self, S: CylMap, T: CylMap, depth: int) -> Fraction:
        """sup_x d(Sx, Tx), exact per leaf of the common refinement"""
        space = S.space
        best = Fraction(0)
        for cell in space.words(depth):
            for leaf in self.symbolic.leaves([S, T], root=cell):
                out_s, residual_s = S.run(leaf)
                out_t, residual_t = T.run(leaf)
                index = next((t for t, (a, b) in enumerate(zip(out_s, out_t)) if a != b), None)
                if index is None:
                    # equal prefixes: the tails differ by a fixed translation
                    shift = space.add(residual_s, space.negate(residual_t))
                    index = space.first_difference(shift, Point.zero())
                if index is not None:
                    best = max(best, Fraction(1, index + 1))
        return best

    def d_D(self, S: CylMap, T: CylMap, depth: int = 0) -> Interval:
        """D(S,T) = sup d(Sx,Tx) + sup d(S⁻¹x,T⁻¹x) for the adic metric"""
        self._same_space(S, T)
        forward = self._sup_gap(S, T, depth)
        backward = self._sup_gap(self.symbolic.invert(S), self.symbolic.invert(T), depth)
        return Interval.exact(forward + backward)

    # -- atomic measures -----------------------------------------------------

    def atomic_delta(self, measures: Sequence[Atomic], n0: Optional[int] = None) -> Fraction:
        """min over measures of the least atom weight and least gap between weights"""
        if not measures:
            raise ValueError("atomic_delta needs at least one measure")
        delta: Optional[Fraction] = None
        for nu in measures:
            weights = nu.weights[:n0] if n0 else nu.weights
            if len(set(weights)) != len(weights):
                raise DuplicateWeightError(f"Atom weights repeat among {[str(w) for w in weights]}")
            candidates = list(weights) + [abs(a - b) for a, b in combinations(weights, 2)]
            local = min(candidates)
            delta = local if delta is None else min(delta, local)
        return delta

    def fixes_atoms(self, S: CylMap, nu: Atomic, n0: Optional[int] = None) -> bool:
        atoms = nu.atoms[:n0] if n0 else nu.atoms
        return all(self.symbolic.apply_point(S, x) == x for x, _ in atoms)

    # -- neighborhoods ---------------------------------------------------------

    def contains(self, spec: NbhdSpec, S: CylMap, depth: int = 0) -> Verdict:
        """Whether S lies in the basic neighborhood ``spec``"""
        T = spec.center
        eps = spec.eps
        if spec.variant == "W":
            return self.in_W(S, T, spec.sets)
        if spec.variant == "Wbar":
            return self.in_Wbar(S, T, spec.sets, spec.measures, eps)
        if spec.variant == "D":
            distance = self.d_D(S, T, depth)
            return Verdict.YES if distance.hi < eps else Verdict.NO if distance.lo >= eps else Verdict.UNKNOWN

        verdicts = []
        for mu in spec.measures:
            if spec.variant == "U":
                bounds = self.dist_uniform(S, T, mu, depth)
                lo, hi = bounds.lo, bounds.hi
            elif spec.variant == "U'":
                search = self.sup_symdiff(S, T, mu, depth)
                lo, hi = search.lower, search.upper
            else:
                lo = self.sup_abs_diff(S, T, mu, depth)
                hi = lo if self._abs_diff_exact(S, T, mu, depth) else Fraction(1)
            verdicts.append(Verdict.YES if hi < eps else Verdict.NO if lo >= eps else Verdict.UNKNOWN)
        return _combine(verdicts)

    # -- reports ---------------------------------------------------------------

    def distance_table(
        self, S: CylMap, T: CylMap, measures: Sequence[MeasureSpec], depth: int = 0
    ) -> List[DistanceRow]:
        metric = self.d_D(S, T, depth)
        return [
            DistanceRow(
                measure=i,
                uniform=self.dist_uniform(S, T, mu, depth),
                symdiff=self.sup_symdiff(S, T, mu, depth),
                abs_diff=self.sup_abs_diff(S, T, mu, depth),
                metric=metric,
            )
            for i, mu in enumerate(measures)
        ]

    def separation_witness(
        self,
        depth: int = 4,
        T: Optional[CylMap] = None,
        S: Optional[CylMap] = None,
        mu: Optional[MeasureSpec] = None,
    ) -> SeparationReport:
        """A pair with sup_F |μ(SF) − μ(TF)| = 0 but μ(E(S,T)) > 0.

        Defaults to the dyadic odometer, its third periodic approximant and
        the uniform measure.
        """
        if T is None or S is None:
            towers = TowerService(symbolic_service=self.symbolic)
            markers = towers.odometer_markers(SeqSpace.constant(2), 3)
            T = markers.T
            S = towers.approximant_map(T, markers, 3)
        mu = mu or Bernoulli.uniform(T.space)
        report = SeparationReport(
            T=T,
            S=S,
            measure=mu,
            depth=depth,
            abs_diff=self.sup_abs_diff(S, T, mu, depth),
            uniform=self.dist_uniform(S, T, mu, depth),
        )
        logger.info(
            f"Separation witness at depth {depth}: abs_diff={report.abs_diff}, uniform={report.uniform}"
        )
        return report
