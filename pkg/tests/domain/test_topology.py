"""Neighborhood predicates and distances between the odometer and its approximants."""

from fractions import Fraction

import pytest

from app.domain.entities.cylmap import CylMap
from app.domain.entities.measures import Atomic
from app.domain.entities.symbolic import CylinderUnion, Point, SeqSpace
from app.domain.entities.topology import NbhdSpec
from app.domain.models.errors import DuplicateWeightError, SpaceMismatchError
from app.domain.models.value_objects import Budgets, Interval, Verdict
from app.domain.services.topology_service import TopologyService

pytestmark = pytest.mark.unit

EIGHTH, QUARTER, HALF = Fraction(1, 8), Fraction(1, 4), Fraction(1, 2)


def _atoms(binary, *weights):
    points = (Point.zero(), Point(period=(1,)), Point.from_word((1,)))
    return Atomic(space=binary, atoms=tuple(zip(points, weights)))


@pytest.fixture
def F(binary):
    return CylinderUnion.of(binary, (1, 1, 1, 0))


class TestDistances:
    def test_uniform_distance_is_exact_once_resolved(self, topology, P3, T, uniform):
        assert topology.dist_uniform(P3, T, uniform, 3) == Interval.exact(QUARTER)
        assert topology.dist_uniform(P3, T, uniform, 6) == Interval.exact(QUARTER)

    def test_uniform_distance_at_depth_zero_is_open(self, topology, P3, T, uniform):
        assert topology.dist_uniform(P3, T, uniform, 0) == Interval(lo=Fraction(0), hi=Fraction(1))

    def test_symmetric_difference_search(self, topology, P3, T, uniform):
        bound = topology.sup_symdiff(P3, T, uniform, 4)
        assert bound.lower == EIGHTH
        assert bound.upper == QUARTER
        assert bound.witness.words == ((1, 1, 1, 0),)
        assert bound.active == 2
        assert bound.exhaustive

    def test_search_cap_falls_back_to_greedy(self, P3, T, uniform):
        capped = TopologyService(budgets=Budgets(search_cap=1))
        bound = capped.sup_symdiff(P3, T, uniform, 4)
        assert not bound.exhaustive
        assert bound.lower <= EIGHTH

    def test_measure_preserving_maps_have_no_mass_gap(self, topology, P3, T, uniform):
        assert topology.sup_abs_diff(P3, T, uniform, 4) == 0

    def test_adic_distance(self, topology, P3, T, binary):
        assert topology.d_D(T, CylMap.identity(binary)) == Interval.exact(2)
        assert topology.d_D(P3, T) == Interval.exact(HALF)

    def test_two_sided_set_difference(self, topology, P3, T, F, uniform):
        assert topology.wbar_sum(P3, T, F, uniform) == EIGHTH

    def test_distance_table_row(self, topology, P3, T, uniform):
        (row,) = topology.distance_table(P3, T, [uniform], 4)
        assert row.cells() == ["0", "1/4", "1/8", "1/4", "0", "1/2"]

    def test_spaces_must_match(self, topology, T, odometer, uniform):
        T3 = odometer.odometer_map(SeqSpace.constant(3))
        with pytest.raises(SpaceMismatchError):
            topology.dist_uniform(T3, T, uniform)

    def test_separation_witness(self, topology):
        report = topology.separation_witness()
        assert report.abs_diff == 0
        assert report.uniform.lo == QUARTER
        assert report.separates


class TestNeighborhoods:
    @pytest.mark.parametrize(
        "variant, eps, expected",
        [
            ("U", HALF, Verdict.YES),
            ("U", QUARTER, Verdict.NO),
            ("U'", HALF, Verdict.YES),
            ("U'", EIGHTH, Verdict.NO),
            ("U'", Fraction(3, 16), Verdict.UNKNOWN),
            ("Vbar", EIGHTH, Verdict.YES),
            ("D", Fraction(1), Verdict.YES),
            ("D", HALF, Verdict.NO),
        ],
    )
    def test_measure_neighborhoods(self, topology, P3, T, uniform, variant, eps, expected):
        spec = NbhdSpec(variant=variant, center=T, measures=(uniform,), eps=eps)
        assert topology.contains(spec, P3, depth=4) == expected

    def test_set_neighborhoods(self, topology, P3, T, F, binary):
        assert topology.contains(NbhdSpec(variant="W", center=T, sets=(F,)), P3) == Verdict.NO
        half = CylinderUnion.of(binary, (0,))
        assert topology.contains(NbhdSpec(variant="W", center=T, sets=(half,)), P3) == Verdict.YES

    @pytest.mark.parametrize("eps, expected", [(EIGHTH, Verdict.NO), (QUARTER, Verdict.YES)])
    def test_two_sided_neighborhood(self, topology, P3, T, F, uniform, eps, expected):
        spec = NbhdSpec(variant="Wbar", center=T, measures=(uniform,), sets=(F,), eps=eps)
        assert topology.contains(spec, P3) == expected

    def test_eps_is_required(self, T, uniform):
        with pytest.raises(ValueError):
            NbhdSpec(variant="U", center=T, measures=(uniform,))
        with pytest.raises(ValueError):
            NbhdSpec(variant="D", center=T, eps=0)

    def test_measures_and_sets_are_required(self, T, uniform):
        with pytest.raises(ValueError):
            NbhdSpec(variant="U", center=T, eps=HALF)
        with pytest.raises(ValueError):
            NbhdSpec(variant="W", center=T)

    def test_restricted_neighborhoods(self, T, binary, uniform):
        nu = _atoms(binary, HALF, QUARTER, QUARTER)
        with pytest.raises(ValueError):
            NbhdSpec(variant="U", center=T, measures=(nu,), eps=HALF, restricted=True)
        split = CylinderUnion.of(binary, (0,), (1, 1))
        with pytest.raises(ValueError):
            NbhdSpec(variant="W", center=T, sets=(split,), restricted=True)
        spec = NbhdSpec(variant="U", center=T, measures=(uniform,), eps=HALF, restricted=True)
        assert spec.restricted


class TestAtomicMeasures:
    def test_delta_is_the_least_weight_or_gap(self, topology, binary):
        nu = _atoms(binary, HALF, Fraction(3, 10), Fraction(1, 5))
        assert topology.atomic_delta([nu]) == Fraction(1, 10)
        assert topology.atomic_delta([nu], n0=1) == HALF

    def test_repeated_weights(self, topology, binary):
        with pytest.raises(DuplicateWeightError):
            topology.atomic_delta([_atoms(binary, HALF, QUARTER, QUARTER)])

    def test_delta_needs_a_measure(self, topology):
        with pytest.raises(ValueError):
            topology.atomic_delta([])

    def test_fixed_atoms(self, topology, T, binary):
        nu = _atoms(binary, HALF, Fraction(3, 10), Fraction(1, 5))
        assert topology.fixes_atoms(CylMap.identity(binary), nu)
        assert not topology.fixes_atoms(T, nu)
