"""Tower domain service: markers, Kakutani-Rokhlin towers and what is built on them.

Everything here works on the cell permutation of a rule table at a
verification depth ``d`` at least its table depth. There ``T`` maps each
depth-d cell ``c·y`` to ``c'·(y + r_c)``, so orbits of cells are the cycles of
a finite permutation and return times are exact. A cycle whose residuals sum
to zero consists of periodic points.
"""

import logging
from fractions import Fraction
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from pydantic import BaseModel, ConfigDict

from ..entities.bratteli import Diagram, Edge
from ..entities.cylmap import CylMap, PiecewisePower
from ..entities.measures import MeasureSpec
from ..entities.paths import PathPrefix
from ..entities.symbolic import CylinderUnion, Point, SeqSpace, merge_cells
from ..entities.towers import (
    DiagramConstruction,
    KMaximalSet,
    LevelBounds,
    MarkerCertificate,
    MarkerReport,
    MarkerSeq,
    RokhlinCertificate,
    Tower,
    TowerPartition,
    TowerSummary,
)
from ..interfaces.events import EventPublisher
from ..models.errors import (
    DepthOverflowError,
    HorizonExhaustedError,
    NestingError,
    PeriodicityError,
    RokhlinInfeasibleError,
    UnresolvedError,
)
from ..models.events import CertificateIssued, ConstructionCompleted
from ..models.value_objects import Budgets, CellClass, ClauseStatus, Word, fraction_text
from ...utils.trace_logger import trace_operation
from .odometer_service import OdometerService
from .sampling_service import SamplingService
from .symbolic_service import SymbolicService
from .vershik_service import VershikService

logger = logging.getLogger(__name__)

MARKER_CLAUSES = (
    "nested",
    "vanishing",
    "complete-section",
    "recurrent",
    "separated",
    "uncountable-bases",
)


class TowerScan(BaseModel):
    """Return-time runs over a set of cells.

    ``runs`` lists, per base cell in sorted order, the cells T^0 c, …,
    T^{k-1} c up to the first return. ``stray`` cells lie on cycles that never
    meet the set; ``overlong`` cells lie on runs longer than the horizon.
    """

    model_config = ConfigDict(frozen=True)

    depth: int
    runs: Tuple[Tuple[Word, ...], ...]
    stray: Tuple[Word, ...] = ()
    overlong: Tuple[Word, ...] = ()

    def runs_by_height(self) -> Dict[int, List[Tuple[Word, ...]]]:
        groups: Dict[int, List[Tuple[Word, ...]]] = {}
        for run in self.runs:
            groups.setdefault(len(run), []).append(run)
        return dict(sorted(groups.items()))

    @property
    def resolved(self) -> bool:
        return not self.stray and not self.overlong


class TowerService:
    """Domain service for markers, towers and tower-based constructions."""

    def __init__(
        self,
        symbolic_service: Optional[SymbolicService] = None,
        budgets: Optional[Budgets] = None,
        event_publisher: Optional[EventPublisher] = None,
        vershik_service: Optional[VershikService] = None,
        odometer_service: Optional[OdometerService] = None,
    ):
        self.budgets = budgets or (symbolic_service.budgets if symbolic_service else Budgets())
        self.symbolic = symbolic_service or SymbolicService(budgets=self.budgets)
        self.vershik = vershik_service or VershikService()
        self.odometer = odometer_service or OdometerService(self.symbolic)
        self._event_publisher = event_publisher
        logger.info(f"Tower service initialized (orbit_horizon={self.budgets.orbit_horizon})")

    # -- cells -----------------------------------------------------------

    def verification_depth(self, T: CylMap, *sets: CylinderUnion, depth: int = 0) -> int:
        return max([depth, T.table_depth] + [A.max_length for A in sets])

    def _permutation(self, T: CylMap, depth: int) -> Dict[Word, Tuple[Word, Point]]:
        if T.space.cell_count(depth) > self.budgets.rule_budget:
            raise DepthOverflowError(
                f"{T.space.cell_count(depth)} cells at depth {depth} exceed the rule budget"
            )
        return self.symbolic.cell_permutation(T, depth)

    def _cycles(self, perm: Dict[Word, Tuple[Word, Point]]) -> List[List[Word]]:
        seen: Set[Word] = set()
        cycles = []
        for start in sorted(perm):
            if start in seen:
                continue
            cycle = []
            cell = start
            while cell not in seen:
                seen.add(cell)
                cycle.append(cell)
                cell = perm[cell][0]
            cycles.append(cycle)
        return cycles

    def _scan(self, T: CylMap, cells: FrozenSet[Word], depth: int, horizon: Optional[int] = None) -> TowerScan:
        horizon = horizon or self.budgets.orbit_horizon
        perm = self._permutation(T, depth)
        runs: List[Tuple[Word, ...]] = []
        stray: List[Word] = []
        overlong: List[Word] = []
        for cycle in self._cycles(perm):
            marks = [i for i, cell in enumerate(cycle) if cell in cells]
            if not marks:
                stray.extend(cycle)
                continue
            for j, start in enumerate(marks):
                stop = marks[j + 1] if j + 1 < len(marks) else marks[0] + len(cycle)
                run = tuple(cycle[i % len(cycle)] for i in range(start, stop))
                if len(run) > horizon:
                    overlong.extend(run)
                else:
                    runs.append(run)
        runs.sort(key=lambda run: run[0])
        return TowerScan(
            depth=depth, runs=tuple(runs), stray=tuple(sorted(stray)), overlong=tuple(sorted(overlong))
        )

    def periodic_cells(self, T: CylMap, depth: Optional[int] = None) -> List[Word]:
        """Depth-d cells made of periodic points: cycles with zero total residual"""
        depth = self.verification_depth(T, depth=depth or 0)
        perm = self._permutation(T, depth)
        found: List[Word] = []
        for cycle in self._cycles(perm):
            total = Point.zero()
            for cell in cycle:
                total = T.space.add(total, perm[cell][1])
            if total.is_zero:
                found.extend(cycle)
        return sorted(found)

    def ensure_aperiodic(self, T: CylMap, depth: Optional[int] = None) -> None:
        periodic = self.periodic_cells(T, depth)
        if periodic:
            shown = CylinderUnion.from_cells(T.space, periodic)
            raise PeriodicityError(f"Periodic points fill {shown}")

    # -- markers -----------------------------------------------------------

    def odometer_markers(self, space: SeqSpace, N: int, kind: str = "zeros") -> MarkerSeq:
        """A_n = [0ⁿ] or A_n = [(λ_0−1)…(λ_{n−1}−1)] for the odometer, certified"""
        if kind not in ("zeros", "ones"):
            raise ValueError(f"Unknown marker preset {kind!r}")
        T = self.odometer.odometer_map(space)
        sets = []
        for n in range(N + 1):
            word = (0,) * n if kind == "zeros" else tuple(s - 1 for s in space.sizes(n))
            sets.append(CylinderUnion.of(space, word))
        certificate = MarkerCertificate(
            return_times=tuple(space.cell_count(n) for n in range(N + 1)),
            vanishing=True,
            note="odometer: the return time to a depth-n cylinder is p_{n-1}",
        )
        return MarkerSeq(T=T, sets=tuple(sets), certificate=certificate, name=kind)

    def validate_markers(self, M: MarkerSeq, n: int, depth: int = 0) -> MarkerReport:
        """Checks the marker clauses for A_n at a verification depth; never raises on defects"""
        T = M.T
        A = M.level(n)
        d = self.verification_depth(T, *M.sets[: n + 1], depth=depth)
        clauses: Dict[str, ClauseStatus] = {}
        notes: List[str] = []

        all_cells = frozenset(T.space.words(d))
        nested = M.level(0).cells(d) == all_cells
        if not nested:
            notes.append("A_0 is not the whole space")
        for i in range(1, n + 1):
            if not M.level(i).cells(d) <= M.level(i - 1).cells(d):
                nested = False
                notes.append(f"A_{i} is not contained in A_{i - 1}")
        clauses["nested"] = ClauseStatus.PASS if nested else ClauseStatus.FAIL

        certificate = M.certificate
        clauses["vanishing"] = (
            ClauseStatus.PASS if certificate and certificate.vanishing else ClauseStatus.UNKNOWN
        )

        cells = A.cells(d)
        inside = self._scan(T, cells, d)
        outside = self._scan(T, all_cells - cells, d)
        if inside.stray or outside.stray:
            clauses["complete-section"] = ClauseStatus.FAIL
            if inside.stray:
                notes.append(f"orbits of {CylinderUnion.from_cells(T.space, inside.stray)} miss A_{n}")
            if outside.stray:
                notes.append(f"orbits of {CylinderUnion.from_cells(T.space, outside.stray)} stay in A_{n}")
        elif inside.overlong or outside.overlong:
            clauses["complete-section"] = ClauseStatus.UNKNOWN
        else:
            clauses["complete-section"] = ClauseStatus.PASS

        if not cells:
            clauses["recurrent"] = ClauseStatus.FAIL
        elif inside.overlong:
            clauses["recurrent"] = ClauseStatus.UNKNOWN
        else:
            clauses["recurrent"] = ClauseStatus.PASS

        if certificate and certificate.return_time(n) is not None:
            for name in ("complete-section", "recurrent"):
                if clauses[name] == ClauseStatus.UNKNOWN:
                    clauses[name] = ClauseStatus.PASS
                    notes.append(f"{name} certified: return time {certificate.return_time(n)}")

        shortest = min((len(run) for run in inside.runs), default=None)
        if shortest is not None and shortest < n:
            clauses["separated"] = ClauseStatus.FAIL
            notes.append(f"A_{n} meets T^{shortest} A_{n}")
        else:
            clauses["separated"] = ClauseStatus.PASS

        clauses["uncountable-bases"] = ClauseStatus.PASS if cells else ClauseStatus.FAIL

        report = MarkerReport(level=n, depth=d, clauses=clauses, notes=tuple(notes))
        logger.info(f"Markers {M.name} at level {n}, depth {d}: failed={report.failed}")
        return report

    # -- towers -------------------------------------------------------------

    def _partition(self, space: SeqSpace, scan: TowerScan) -> TowerPartition:
        towers = []
        for height, runs in scan.runs_by_height().items():
            levels = tuple(
                CylinderUnion.from_cells(space, [run[i] for run in runs]) for i in range(height)
            )
            towers.append(Tower(base=levels[0], height=height, levels=levels))
        return TowerPartition(
            space=space,
            depth=scan.depth,
            towers=tuple(towers),
            unresolved=CylinderUnion.from_cells(space, scan.stray + scan.overlong),
        )

    @trace_operation("build_towers")
    def build_towers(
        self,
        T: CylMap,
        A: CylinderUnion,
        depth: int = 0,
        horizon: Optional[int] = None,
    ) -> TowerPartition:
        """Towers {T^i C_k : 0 ≤ i < k} over the return-time classes C_k of A.

        Cells whose orbit misses A or whose return exceeds the horizon are
        reported in ``unresolved`` rather than raised.
        """
        T.space.ensure_same(A.space)
        d = self.verification_depth(T, A, depth=depth)
        scan = self._scan(T, A.cells(d), d, horizon)
        partition = self._partition(T.space, scan)
        if not partition.is_complete:
            logger.warning(f"Towers over {A} leave {partition.unresolved} unresolved")
        logger.info(f"Built towers over {A} at depth {d}: heights {partition.heights}")
        if self._event_publisher:
            self._event_publisher.publish(
                ConstructionCompleted(
                    aggregate_id=f"towers-{d}",
                    construction="towers",
                    levels=len(partition.towers),
                )
            )
        return partition

    def k_maximal(self, T: CylMap, xi: TowerPartition, k: int) -> KMaximalSet:
        """Every k-th level of each tower from the base, ⌊h/k⌋ strides per tower"""
        if k < 2:
            raise ValueError("k_maximal needs k ≥ 2")
        T.space.ensure_same(xi.space)
        d = max(xi.depth, T.table_depth)
        chosen: Set[Word] = set()
        strides = []
        for tower in xi.towers:
            picked = tuple(j * k for j in range(tower.height // k))
            strides.append((tower.height, picked))
            for i in picked:
                chosen |= tower.levels[i].cells(d)

        perm = self._permutation(T, d)
        inverse = {image: cell for cell, (image, _) in perm.items()}

        disjoint = ClauseStatus.PASS
        forward = set(chosen)
        for _ in range(1, k):
            forward = {perm[c][0] for c in forward}
            if forward & chosen:
                disjoint = ClauseStatus.FAIL
                break

        covered = set(chosen)
        ahead, behind = set(chosen), set(chosen)
        for _ in range(1, k):
            ahead = {perm[c][0] for c in ahead}
            behind = {inverse[c] for c in behind}
            covered |= ahead | behind
        if covered == set(perm):
            covering = ClauseStatus.PASS
        elif xi.is_complete:
            covering = ClauseStatus.FAIL
        else:
            covering = ClauseStatus.UNKNOWN

        logger.debug(f"k-maximal set for k={k}: disjoint={disjoint.value}, covering={covering.value}")
        return KMaximalSet(
            k=k,
            set=CylinderUnion.from_cells(T.space, chosen),
            levels=tuple(strides),
            disjoint=disjoint,
            covering=covering,
        )

    def _pieces(
        self, space: SeqSpace, groups: Dict[int, Iterable[Word]]
    ) -> Tuple[Tuple[Word, int], ...]:
        pieces: List[Tuple[Word, int]] = []
        for exponent, cells in groups.items():
            pieces.extend((word, exponent) for word in merge_cells(space, cells))
        return tuple(sorted(pieces))

    def induced(
        self, T: CylMap, A: CylinderUnion, horizon: Optional[int] = None, depth: int = 0
    ) -> PiecewisePower:
        """First-return map on A (exponent k on C_k), the identity off A"""
        d = self.verification_depth(T, A, depth=depth)
        cells = A.cells(d)
        scan = self._scan(T, cells, d, horizon)
        unresolved_in_A = [c for c in scan.overlong if c in cells]
        if unresolved_in_A:
            raise HorizonExhaustedError(
                f"Return to {A} exceeds the horizon on {CylinderUnion.from_cells(T.space, unresolved_in_A)}"
            )
        groups: Dict[int, Set[Word]] = {0: set(T.space.words(d)) - cells}
        for height, runs in scan.runs_by_height().items():
            groups.setdefault(height, set()).update(run[0] for run in runs)
        groups = {e: c for e, c in groups.items() if c}
        return self.symbolic.piecewise(T, self._pieces(T.space, groups))

    def induced_map(self, T: CylMap, A: CylinderUnion, horizon: Optional[int] = None) -> CylMap:
        return self.symbolic.to_cylmap(self.induced(T, A, horizon))

    # -- periodic approximants --------------------------------------------

    def periodic_approx(self, T: CylMap, M: MarkerSeq, n: int) -> PiecewisePower:
        """P_n = T off the tower tops and T^{-(k-1)} on the top of a height-k tower"""
        A = M.level(n)
        d = self.verification_depth(T, A)
        scan = self._scan(T, A.cells(d), d)
        if not scan.resolved:
            raise UnresolvedError(
                f"Towers over A_{n} do not cover the space at depth {d}"
            )
        groups: Dict[int, Set[Word]] = {}
        for run in scan.runs:
            groups.setdefault(1, set()).update(run[:-1])
            groups.setdefault(1 - len(run), set()).add(run[-1])
        groups = {e: c for e, c in groups.items() if c}
        logger.debug(f"P_{n} built from {len(scan.runs)} run(s) at depth {d}")
        return self.symbolic.piecewise(T, self._pieces(T.space, groups))

    def approximant_map(self, T: CylMap, M: MarkerSeq, n: int) -> CylMap:
        return self.symbolic.to_cylmap(self.periodic_approx(T, M, n))

    def check_periodicity(self, T: CylMap, M: MarkerSeq, n: int) -> bool:
        """P_n^k is the identity on every height-k tower over A_n"""
        P = self.approximant_map(T, M, n)
        identity = CylMap.identity(T.space)
        xi = self.build_towers(T, M.level(n))
        for tower in xi.towers:
            Pk = self.symbolic.power(P, tower.height)
            for level in tower.levels:
                for word in level.words:
                    if self.symbolic.classify_cell(Pk, identity, word) != CellClass.EQUAL:
                        logger.warning(f"P_{n}^{tower.height} moves points of {level}")
                        return False
        return True

    def check_monotone_agreement(
        self, T: CylMap, M: MarkerSeq, n: int, points: Sequence[Point]
    ) -> bool:
        """Wherever P_n agrees with T so does P_{n+1}"""
        P = self.approximant_map(T, M, n)
        Q = self.approximant_map(T, M, n + 1)
        for x in points:
            Tx = self.symbolic.apply_point(T, x)
            if self.symbolic.apply_point(P, x) == Tx and self.symbolic.apply_point(Q, x) != Tx:
                logger.warning(f"P_{n} agrees with T at {x} but P_{n + 1} does not")
                return False
        return True

    # -- Rokhlin sets --------------------------------------------------------

    def _mass(self, mu: MeasureSpec, space: SeqSpace, cells: Iterable[Word]) -> Fraction:
        return self.symbolic.measure(mu, CylinderUnion.from_cells(space, cells))

    def level_bounds(
        self,
        T: CylMap,
        M: MarkerSeq,
        n: int,
        m: int,
        eps: Fraction,
        measures: Sequence[MeasureSpec],
    ) -> LevelBounds:
        """Mass of the short towers and of the last m−1 levels of the tall ones"""
        scan = self._level_scan(T, M, n)
        short: List[Word] = []
        leftover: List[Word] = []
        for run in scan.runs:
            if len(run) < m:
                short.extend(run)
            else:
                leftover.extend(run[len(run) - m + 1 :])
        short_mass = tuple(self._mass(mu, T.space, short) for mu in measures)
        leftover_mass = tuple(self._mass(mu, T.space, leftover) for mu in measures)
        half = Fraction(eps) / 2
        meets = all(s < half for s in short_mass) and all(r <= half for r in leftover_mass)
        return LevelBounds(
            level=n, m=m, short_mass=short_mass, leftover_mass=leftover_mass, meets=meets
        )

    def _level_scan(self, T: CylMap, M: MarkerSeq, n: int) -> TowerScan:
        A = M.level(n)
        d = self.verification_depth(T, A)
        scan = self._scan(T, A.cells(d), d)
        if not scan.resolved:
            raise UnresolvedError(f"Towers over A_{n} do not cover the space at depth {d}")
        return scan

    def rokhlin_from_level(
        self,
        T: CylMap,
        M: MarkerSeq,
        n: int,
        m: int,
        eps: Fraction,
        measures: Sequence[MeasureSpec],
    ) -> RokhlinCertificate:
        """F = levels 0, m, 2m, … of every tower of height ≥ m over A_n"""
        if m < 1:
            raise ValueError("m must be positive")
        eps = Fraction(eps)
        scan = self._level_scan(T, M, n)
        bounds = self.level_bounds(T, M, n, m, eps, measures)

        F: Set[Word] = set()
        for run in scan.runs:
            for j in range(len(run) // m):
                F.add(run[j * m])

        perm = self._permutation(T, scan.depth)
        iterates = [set(F)]
        for _ in range(1, m):
            iterates.append({perm[c][0] for c in iterates[-1]})
        union: Set[Word] = set().union(*iterates)
        disjoint = len(union) == sum(len(s) for s in iterates)
        coverage = tuple(self._mass(mu, T.space, union) for mu in measures)

        towers = []
        for height, runs in scan.runs_by_height().items():
            base = CylinderUnion.from_cells(T.space, [run[0] for run in runs])
            masses = tuple(self.symbolic.measure(mu, base) for mu in measures)
            towers.append(TowerSummary(base=str(base), height=height, masses=masses))

        return RokhlinCertificate(
            level=n,
            m=m,
            eps=eps,
            F=CylinderUnion.from_cells(T.space, F),
            disjoint=disjoint,
            coverage=coverage,
            bounds=bounds,
            towers=tuple(towers),
        )

    def scan_levels(
        self,
        T: CylMap,
        M: MarkerSeq,
        m: int,
        eps: Fraction,
        measures: Sequence[MeasureSpec],
    ) -> List[LevelBounds]:
        """Level bounds from A_1 upward, ending at the first level that meets them.

        The last entry fails to meet only when no level up to the marker
        truncation does.
        """
        self.ensure_aperiodic(T, self.verification_depth(T, *M.sets))
        scanned: List[LevelBounds] = []
        for n in range(1, M.depth + 1):
            bounds = self.level_bounds(T, M, n, m, Fraction(eps), measures)
            logger.debug(
                f"Level {n}: short={[fraction_text(s) for s in bounds.short_mass]}, "
                f"leftover={[fraction_text(r) for r in bounds.leftover_mass]}"
            )
            scanned.append(bounds)
            if bounds.meets:
                break
        return scanned

    @trace_operation("rokhlin_set")
    def rokhlin_set(
        self,
        T: CylMap,
        M: MarkerSeq,
        m: int,
        eps: Fraction,
        measures: Sequence[MeasureSpec],
        level: Optional[int] = None,
    ) -> RokhlinCertificate:
        """A Rokhlin set for m and ε, from the first marker level deep enough.

        Raises RokhlinInfeasibleError carrying the best certificate seen when
        no level up to the marker truncation meets the bounds.
        """
        eps = Fraction(eps)
        if not 0 < eps < 1:
            raise ValueError("ε must lie strictly between 0 and 1")

        if level is not None:
            self.ensure_aperiodic(T, self.verification_depth(T, *M.sets))
            certificate = self.rokhlin_from_level(T, M, level, m, eps, measures)
            self._publish_certificate(certificate)
            return certificate

        scanned = self.scan_levels(T, M, m, eps, measures)
        if scanned and scanned[-1].meets:
            n = scanned[-1].level
            logger.info(f"Rokhlin set for m={m}, ε={eps} found at level {n}")
            certificate = self.rokhlin_from_level(T, M, n, m, eps, measures)
            self._publish_certificate(certificate)
            return certificate

        best = max(
            (self.rokhlin_from_level(T, M, b.level, m, eps, measures) for b in scanned),
            key=lambda c: min(c.coverage, default=Fraction(0)),
            default=None,
        )
        raise RokhlinInfeasibleError(
            f"No marker level up to {M.depth} meets the bounds for m={m}, ε={fraction_text(eps)}",
            best=best,
        )

    def _publish_certificate(self, certificate: RokhlinCertificate) -> None:
        if not self._event_publisher:
            return
        self._event_publisher.publish(
            CertificateIssued(
                aggregate_id=f"rokhlin-{certificate.level}",
                certificate_kind="rokhlin",
                success=certificate.success,
                summary={
                    "level": str(certificate.level),
                    "coverage": ", ".join(fraction_text(c) for c in certificate.coverage),
                },
            )
        )

    # -- diagrams from markers -------------------------------------------------

    @trace_operation("diagram_from_markers")
    def diagram_from_markers(
        self,
        T: CylMap,
        M: MarkerSeq,
        N: int,
        split_bases: bool = False,
        samples: int = 100,
        seed: int = 0,
    ) -> Tuple[DiagramConstruction, Callable[[Point], PathPrefix]]:
        """Vertices are towers over A_n, edges are traversals of ξ_n-towers by ξ_{n+1}-towers.

        Returns the construction and the coordinate map sending a point to
        its path prefix of length N. With ``split_bases`` the level-n towers
        are also split by whether their base lies in A_{n+1}.
        """
        if N < 1 or N > M.depth:
            raise ValueError(f"N must lie in 1..{M.depth}")
        d = self.verification_depth(T, *M.sets[: N + 1])
        levels = [M.level(n).cells(d) for n in range(N + 1)]
        for n in range(1, N + 1):
            if not levels[n] <= levels[n - 1]:
                raise NestingError(f"A_{n} is not contained in A_{n - 1}")

        # position[n][cell] = (vertex, index of the cell inside its tower)
        position: List[Dict[Word, Tuple[int, int]]] = [{cell: (0, 0) for cell in levels[0]}]
        heights: List[List[int]] = [[1]]
        itineraries: List[List[Tuple[int, ...]]] = [[]]
        counts = [1]
        for n in range(1, N + 1):
            scan = self._scan(T, levels[n], d)
            if not scan.resolved:
                raise UnresolvedError(f"Towers over A_{n} do not cover the space at depth {d}")
            ids: Dict[tuple, int] = {}
            level_heights: List[int] = []
            level_itineraries: List[Tuple[int, ...]] = []
            here: Dict[Word, Tuple[int, int]] = {}
            for run in scan.runs:
                if n == 1:
                    itinerary: Tuple[int, ...] = (0,) * len(run)
                else:
                    itinerary = tuple(
                        position[n - 1][cell][0] for cell in run if position[n - 1][cell][1] == 0
                    )
                key: tuple = (itinerary,)
                if split_bases and n < N:
                    key += (run[0] in levels[n + 1],)
                if key not in ids:
                    ids[key] = len(ids)
                    level_heights.append(len(run))
                    level_itineraries.append(itinerary)
                vertex = ids[key]
                for i, cell in enumerate(run):
                    here[cell] = (vertex, i)
            position.append(here)
            heights.append(level_heights)
            itineraries.append(level_itineraries)
            counts.append(len(ids))

        edges = []
        for n in range(1, N + 1):
            for v, itinerary in enumerate(itineraries[n]):
                edges.extend((n, source, v, rank) for rank, source in enumerate(itinerary))
        diagram = Diagram.from_edges(counts, edges)

        def coordinate(x: Point) -> PathPrefix:
            cell = x.prefix(d)
            path: List[Edge] = []
            for n in range(1, N + 1):
                v, i = position[n][cell]
                if n == 1:
                    path.append(Edge(level=1, source=0, target=v, rank=i))
                    continue
                offset = 0
                for rank, source in enumerate(itineraries[n][v]):
                    height = heights[n - 1][source]
                    if i < offset + height:
                        path.append(Edge(level=n, source=source, target=v, rank=rank))
                        break
                    offset += height
            return PathPrefix(edges=tuple(path))

        sampled, failures = self._check_conjugacy(T, diagram, coordinate, N, d, samples, seed)
        construction = DiagramConstruction(
            diagram=diagram,
            tower_heights=tuple(tuple(h) for h in heights[1:]),
            depth=d,
            sampled=sampled,
            conjugacy_failures=failures,
        )
        logger.info(
            f"Diagram from markers {M.name}: vertices {counts}, "
            f"{failures} conjugacy failure(s) on {sampled} point(s)"
        )
        if self._event_publisher:
            self._event_publisher.publish(
                ConstructionCompleted(
                    aggregate_id=f"diagram-{M.name}-{N}",
                    construction="diagram_from_markers",
                    levels=N,
                )
            )
        return construction, coordinate

    def _check_conjugacy(
        self,
        T: CylMap,
        diagram: Diagram,
        coordinate: Callable[[Point], PathPrefix],
        N: int,
        depth: int,
        samples: int,
        seed: int,
    ) -> Tuple[int, int]:
        """Compares F(Tx) with the Vershik successor of F(x) on sampled points"""
        sampler = SamplingService(seed)
        rng = sampler.rng()
        sampled = failures = 0
        for _ in range(samples):
            x = sampler.point(rng, T.space, head_length=depth + 2)
            prefix = coordinate(x)
            rank = self.vershik.rank(diagram, prefix)
            if rank + 1 >= self.vershik.height(diagram, N, prefix.terminal):
                continue
            expected = self.vershik.unrank(diagram, N, prefix.terminal, rank + 1)
            sampled += 1
            if coordinate(self.symbolic.apply_point(T, x)) != expected:
                failures += 1
                logger.warning(f"Conjugacy fails at {x}")
        return sampled, failures

