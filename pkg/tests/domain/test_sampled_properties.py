"""Seeded laws of the constructions, checked on sampled points, paths and maps."""

import random
from fractions import Fraction

import pytest

from app.domain.entities.adic import AdicInt
from app.domain.entities.cylmap import CylMap, Rule
from app.domain.entities.measures import Atomic, Bernoulli
from app.domain.entities.paths import DigitTail, LazyPath
from app.domain.entities.symbolic import CylinderUnion, Point, SeqSpace
from app.domain.models.value_objects import Interval, Verdict
from app.domain.services.sampling_service import SamplingService

pytestmark = pytest.mark.unit

SEEDS = range(20)


def _two_sided_point(sampler, rng, space, head_length=12):
    """A sampled binary point that is neither eventually 0 nor eventually 1"""
    x = sampler.point(rng, space, head_length)
    return Point(head=x.head, period=x.period + (0, 1))


def _setwise(rng: random.Random, space: SeqSpace, F: CylinderUnion, depth: int) -> CylMap:
    """A random cell permutation with tail carries that maps F onto itself"""
    inside = sorted(F.cells(depth))
    outside = sorted(set(space.words(depth)) - set(inside))
    rules = []
    for block in (inside, outside):
        images = block[:]
        rng.shuffle(images)
        for source, target in zip(block, images):
            addend = Point.unit(depth, 1) if rng.random() < 0.5 else Point.zero()
            rules.append(Rule(source=source, target=target, addend=addend))
    return CylMap(space=space, rules=tuple(sorted(rules, key=lambda r: r.source)))


def _pair(seed, space, lazy=True):
    sampler = SamplingService(seed)
    rng = sampler.rng()
    depth = rng.randint(1, 4)
    return depth, sampler.cylmap(rng, space, depth, lazy=lazy), sampler.cylmap(rng, space, depth, lazy=lazy)


@pytest.mark.slow
class TestOdometerConjugacy:
    @pytest.fixture
    def diagram(self, odometer, binary):
        return odometer.to_vershik_diagram(binary, 12)

    def test_successor_and_predecessor_are_inverse(self, vershik, diagram, binary):
        sampler = SamplingService(0)
        rng = sampler.rng()
        for _ in range(1000):
            x = _two_sided_point(sampler, rng, binary)
            y = LazyPath(diagram=diagram, tail=DigitTail(point=x), depth_budget=64)
            assert vershik.successor(vershik.predecessor(y)).prefix(12) == y.prefix(12)
            assert vershik.predecessor(vershik.successor(y)).prefix(12) == y.prefix(12)

    def test_successor_adds_one_to_the_digits(self, vershik, odometer, diagram, binary):
        sampler = SamplingService(1)
        rng = sampler.rng()
        one = AdicInt.one(binary)
        for _ in range(1000):
            x = AdicInt(space=binary, value=_two_sided_point(sampler, rng, binary))
            y = LazyPath(diagram=diagram, tail=DigitTail(point=x.value), depth_budget=64)
            assert vershik.successor(y).prefix(32).labels == odometer.add_one(x).value.prefix(32)
            assert vershik.predecessor(y).prefix(32).labels == odometer.sub(x, one).value.prefix(32)


class TestSampledDiagramPaths:
    @pytest.mark.parametrize("seed", range(5))
    def test_inverse_pair_on_deep_diagrams(self, vershik, bratteli, seed):
        sampler = SamplingService(seed)
        rng = sampler.rng()
        D = sampler.diagram(rng, levels=12)
        assert bratteli.validate(D).is_valid
        checked = 0
        for _ in range(200):
            y = sampler.lazy_path(rng, D, 12)
            edges = y.edges(12)
            if not all(vershik.is_minimal_edge(e) for e in edges):
                assert vershik.successor(vershik.predecessor(y)).prefix(12) == y.prefix(12)
                checked += 1
            if not all(vershik.is_maximal_edge(D, e) for e in edges):
                assert vershik.predecessor(vershik.successor(y)).prefix(12) == y.prefix(12)
        assert checked > 0

    @pytest.mark.parametrize("seed", SEEDS)
    def test_rank_grows_by_one_from_the_switch_level(self, vershik, seed):
        sampler = SamplingService(seed)
        rng = sampler.rng()
        D = sampler.diagram(rng, levels=6)
        for _ in range(50):
            y = sampler.lazy_path(rng, D, 6)
            if all(vershik.is_maximal_edge(D, e) for e in y.edges(6)):
                continue
            k = vershik.switch_level(y)
            z = vershik.successor(y)
            for n in range(1, 7):
                before = vershik.rank(D, y.prefix(n))
                after = vershik.rank(D, z.prefix(n))
                assert after == (before + 1 if n >= k else 0)


class TestPeriodicApproximation:
    @pytest.mark.parametrize("n", range(1, 9))
    def test_disagreement_mass_halves_with_each_level(self, towers, topology, binary, uniform, n):
        M = towers.odometer_markers(binary, n)
        P = towers.approximant_map(M.T, M, n)
        assert topology.dist_uniform(P, M.T, uniform, n) == Interval.exact(Fraction(2) ** (1 - n))

    def test_approximants_agree_from_one_past_the_first_zero(self, towers, symbolic, T, binary):
        M = towers.odometer_markers(binary, 8)
        approximants = {n: towers.approximant_map(T, M, n) for n in range(1, 9)}
        sampler = SamplingService(0)
        rng = sampler.rng()
        for _ in range(100):
            x = sampler.point(rng, binary, 12)
            j = rng.randrange(8)
            x = Point(head=(1,) * j + (0,) + x.head[j + 1 :], period=x.period)
            Tx = symbolic.apply_point(T, x)
            agree = [symbolic.apply_point(approximants[n], x) == Tx for n in range(1, 9)]
            assert agree == [n > j for n in range(1, 9)]


class TestSeparationWitness:
    @pytest.mark.parametrize("depth", range(4, 11))
    def test_no_mass_gap_at_a_fixed_uniform_distance(self, topology, P3, T, uniform, depth):
        assert topology.sup_abs_diff(P3, T, uniform, depth) == 0
        assert topology.dist_uniform(P3, T, uniform, depth) == Interval.exact(Fraction(1, 4))


@pytest.mark.slow
class TestSymmetricDifferenceBounds:
    @pytest.mark.parametrize("seed", range(50))
    def test_search_stays_below_the_image_masses(self, topology, symbolic, binary, uniform, seed):
        depth, S, T = _pair(seed, binary)
        bound = topology.sup_symdiff(S, T, uniform, depth)
        E0 = symbolic.forward_difference(S, T)
        ceiling = symbolic.measure(uniform, symbolic.image(T, E0)) + symbolic.measure(
            uniform, symbolic.image(S, E0)
        )
        assert bound.lower <= bound.upper == ceiling

        distance = topology.dist_uniform(S, T, uniform, depth)
        assert distance.lo == distance.hi
        assert bound.upper <= 2 * distance.lo
        for k in range(1, 9):
            eps = Fraction(k, 8)
            if distance.hi < eps / 2:
                assert bound.upper < eps


class TestDisagreementSets:
    @pytest.mark.parametrize("seed", SEEDS)
    def test_symmetric_under_inversion(self, symbolic, binary, seed):
        depth, S, T = _pair(seed, binary)
        assert symbolic.e_set(S, T, depth) == symbolic.e_set(symbolic.invert(S), symbolic.invert(T), depth)

    @pytest.mark.parametrize("seed", SEEDS)
    def test_triangle_containment(self, symbolic, binary, seed):
        depth, R, S = _pair(seed, binary)
        sampler = SamplingService(seed)
        T = sampler.cylmap(sampler.rng(salt=1), binary, depth, lazy=True)
        rt, rs, st = (symbolic.e_set(a, b, depth) for a, b in ((R, T), (R, S), (S, T)))
        assert not rt.unresolved
        assert set(rt.different) <= set(rs.different) | set(st.different)

    @pytest.mark.parametrize("seed", SEEDS)
    def test_refinement_keeps_resolved_cells(self, symbolic, binary, seed):
        depth, S, T = _pair(seed, binary)
        for d in range(depth + 1):
            coarse, fine = symbolic.diff_set(S, T, d), symbolic.diff_set(S, T, d + 1)
            for cell in coarse.different:
                assert all(child in fine.different for child in binary.children(cell))
            for cell in coarse.equal:
                assert all(child in fine.equal for child in binary.children(cell))
        assert not symbolic.diff_set(S, T, depth).unresolved

    @pytest.mark.parametrize("seed", SEEDS)
    def test_uniform_bounds_nest_with_depth(self, topology, binary, uniform, seed):
        depth, S, T = _pair(seed, binary)
        previous = Interval(lo=Fraction(0), hi=Fraction(1))
        for d in range(depth + 2):
            current = topology.dist_uniform(S, T, uniform, d)
            assert previous.lo <= current.lo <= current.hi <= previous.hi
            previous = current

    @pytest.mark.parametrize("seed", SEEDS)
    def test_mass_gap_grows_with_depth(self, topology, binary, seed):
        skew = Bernoulli(space=binary, period=((Fraction(1, 3), Fraction(2, 3)),))
        depth, S, T = _pair(seed, binary)
        gaps = [topology.sup_abs_diff(S, T, skew, d) for d in range(depth + 2)]
        assert gaps == sorted(gaps)


class TestSetNeighborhoods:
    @pytest.mark.parametrize("seed", SEEDS)
    def test_w_neighborhoods_chain(self, symbolic, topology, binary, seed):
        sampler = SamplingService(seed)
        rng = sampler.rng()
        cells = list(binary.words(3))
        F = CylinderUnion.from_cells(binary, rng.sample(cells, rng.randint(1, 7)))
        R = sampler.cylmap(rng, binary, 3, lazy=True)
        S = symbolic.compose(R, _setwise(rng, binary, F, 3))
        T = symbolic.compose(S, _setwise(rng, binary, F, 3))
        assert topology.in_W(R, S, [F]) == Verdict.YES
        assert topology.in_W(S, T, [F]) == Verdict.YES
        assert topology.in_W(R, T, [F]) == Verdict.YES

        U = sampler.cylmap(rng, binary, 3, lazy=True)
        assert topology.in_W(R, U, [F]) == topology.in_W(T, U, [F])


class TestAdicMetric:
    @pytest.mark.parametrize(
        "space", [SeqSpace.constant(2), SeqSpace(period=(2, 3))], ids=["dyadic", "mixed"]
    )
    def test_ultrametric_and_translation_invariant(self, odometer, space):
        sampler = SamplingService(7)
        rng = sampler.rng()
        d = odometer.adic_metric
        for _ in range(100):
            x, y, z, b = (AdicInt(space=space, value=sampler.point(rng, space, 6)) for _ in range(4))
            assert d(x, x) == 0
            assert d(x, y) == d(y, x)
            assert d(x, z) <= max(d(x, y), d(y, z))
            assert d(odometer.add(x, b), odometer.add(y, b)) == d(x, y)


class TestAtomicRigidity:
    @pytest.fixture
    def nu(self, binary):
        atoms = (
            (Point.zero(), Fraction(1, 2)),
            (Point(period=(1,)), Fraction(3, 10)),
            (Point.from_word((1,)), Fraction(1, 5)),
        )
        return Atomic(space=binary, atoms=atoms)

    def _sampled(self, sampler, rng, binary, nu, kind):
        """Free maps, maps pinning the atom cells, and maps drifting one atom inside its cell"""
        if kind == 0:
            return sampler.cylmap(rng, binary, 3, lazy=True)
        pinned = {x.prefix(3) for x, _ in nu.atoms}
        F = CylinderUnion.from_cells(binary, sorted(set(binary.words(3)) - pinned))
        free = _setwise(rng, binary, F, 3)
        drifting = rng.choice(sorted(pinned)) if kind == 2 else None
        rules = [
            r
            if r.source not in pinned
            else Rule(
                source=r.source,
                target=r.source,
                addend=Point.unit(3, 1) if r.source == drifting else Point.zero(),
            )
            for r in free.rules
        ]
        return CylMap(space=binary, rules=tuple(rules))

    def test_small_mass_gap_fixes_every_atom(self, topology, binary, nu):
        delta = topology.atomic_delta([nu])
        assert delta == Fraction(1, 10)
        identity = CylMap.identity(binary)
        sampler = SamplingService(0)
        rng = sampler.rng()
        outcomes = set()
        for i in range(20):
            S = self._sampled(sampler, rng, binary, nu, kind=i % 3)
            gap = topology.sup_abs_diff(S, identity, nu, 4)
            fixed = topology.fixes_atoms(S, nu)
            if gap < delta:
                assert fixed
            assert gap == 0 or gap >= delta
            outcomes.add(fixed)
        assert outcomes == {True, False}
