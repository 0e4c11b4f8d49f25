"""Markers, Kakutani-Rokhlin towers, induced maps, periodic approximants and Rokhlin sets."""

from fractions import Fraction

import pytest

from app.domain.entities.cylmap import CylMap
from app.domain.entities.symbolic import CylinderUnion, Point
from app.domain.entities.towers import MarkerSeq
from app.domain.models.errors import (
    HorizonExhaustedError,
    NestingError,
    PeriodicityError,
    RokhlinInfeasibleError,
)
from app.domain.models.events import CertificateIssued, ConstructionCompleted
from app.domain.models.value_objects import ClauseStatus
from app.domain.services.sampling_service import SamplingService

pytestmark = pytest.mark.unit

EPS = Fraction(3, 10)


@pytest.fixture
def identity(binary):
    return CylMap.identity(binary)


def _split_markers(T, binary):
    """A_1 = [0] and A_2 = [1]: the second level leaves the first"""
    return MarkerSeq(
        T=T,
        sets=(
            CylinderUnion.whole(binary),
            CylinderUnion.of(binary, (0,)),
            CylinderUnion.of(binary, (1,)),
        ),
    )


def _half_markers(T, binary):
    return MarkerSeq(T=T, sets=(CylinderUnion.whole(binary), CylinderUnion.of(binary, (0,))))


class TestMarkers:
    @pytest.mark.parametrize("n", range(1, 7))
    def test_zero_markers_pass_every_clause(self, towers, markers, n):
        report = towers.validate_markers(markers, n, depth=2 * n)
        assert report.passed, report.notes
        assert report.depth == 2 * n

    def test_default_depth_is_the_marker_depth(self, towers, markers):
        assert towers.validate_markers(markers, 3).depth == 3

    def test_ones_preset_uses_the_top_digits(self, towers, binary):
        M = towers.odometer_markers(binary, 2, kind="ones")
        assert M.level(2).words == ((1, 1),)
        assert M.certificate.return_time(2) == 4

    def test_unknown_preset(self, towers, binary):
        with pytest.raises(ValueError):
            towers.odometer_markers(binary, 2, kind="twos")

    def test_markers_that_are_not_nested(self, towers, T, binary):
        report = towers.validate_markers(_split_markers(T, binary), 2)
        assert "nested" in report.failed
        assert report.clauses["vanishing"] == ClauseStatus.UNKNOWN

    def test_identity_orbits_miss_the_marker(self, towers, identity, binary):
        M = _half_markers(identity, binary)
        report = towers.validate_markers(M, 1)
        assert report.clauses["complete-section"] == ClauseStatus.FAIL
        assert report.clauses["separated"] == ClauseStatus.PASS

    def test_marker_levels_are_bounded(self, markers):
        with pytest.raises(IndexError):
            markers.level(7)


class TestTowers:
    def test_single_tower_over_a_deep_cylinder(self, towers, T, binary, events):
        xi = towers.build_towers(T, CylinderUnion.of(binary, (0, 0, 0)))
        assert xi.heights == (8,)
        assert xi.is_complete
        assert xi.towers[0].levels[1].words == ((1, 0, 0),)
        event = events.last(ConstructionCompleted)
        assert event.construction == "towers"

    def test_return_times_split_the_base(self, towers, T, binary):
        xi = towers.build_towers(T, CylinderUnion.of(binary, (0,), (1, 1)))
        assert xi.heights == (1, 2)
        assert xi.tower_of_height(2).base.words == ((0, 0),)
        assert xi.tower_of_height(1).base.words == ((0, 1), (1, 1))

    def test_orbits_missing_the_set_stay_unresolved(self, towers, identity, binary):
        xi = towers.build_towers(identity, CylinderUnion.of(binary, (0,)))
        assert not xi.is_complete
        assert xi.unresolved.words == ((1,),)

    @pytest.mark.parametrize(
        "k, picked", [(3, (0, 3)), (2, (0, 2, 4, 6)), (8, (0,))], ids=["k3", "k2", "k8"]
    )
    def test_k_maximal_strides(self, towers, T, binary, k, picked):
        xi = towers.build_towers(T, CylinderUnion.of(binary, (0, 0, 0)))
        K = towers.k_maximal(T, xi, k)
        assert K.levels == ((8, picked),)
        assert K.disjoint == ClauseStatus.PASS
        assert K.covering == ClauseStatus.PASS

    def test_k_maximal_set_cells(self, towers, T, binary):
        xi = towers.build_towers(T, CylinderUnion.of(binary, (0, 0, 0)))
        assert towers.k_maximal(T, xi, 3).set.words == ((0, 0, 0), (1, 1, 0))

    def test_k_maximal_needs_k_at_least_two(self, towers, T, binary):
        xi = towers.build_towers(T, CylinderUnion.of(binary, (0, 0, 0)))
        with pytest.raises(ValueError):
            towers.k_maximal(T, xi, 1)


class TestInducedMaps:
    def test_first_return_to_a_half(self, towers, symbolic, T, binary):
        element = towers.induced(T, CylinderUnion.of(binary, (0,)))
        assert element.exponent_for((0,)) == 2
        assert element.exponent_for((1,)) == 0
        induced = towers.induced_map(T, CylinderUnion.of(binary, (0,)))
        assert symbolic.apply_point(induced, Point.zero()) == Point(head=(0, 1))
        assert symbolic.apply_point(induced, Point(period=(1,))) == Point(period=(1,))

    def test_return_beyond_the_horizon(self, towers, T, binary):
        with pytest.raises(HorizonExhaustedError):
            towers.induced(T, CylinderUnion.of(binary, (0, 0, 0)), horizon=4)


class TestPeriodicApproximants:
    def test_approximant_rules(self, P3):
        assert sorted((r.source, r.target) for r in P3.rules) == [
            ((0,), (1,)),
            ((1, 0), (0, 1)),
            ((1, 1, 0), (0, 0, 1)),
            ((1, 1, 1), (0, 0, 0)),
        ]

    def test_approximant_exponents(self, towers, T, markers):
        element = towers.periodic_approx(T, markers, 3)
        assert element.exponents == [-7, 1]
        assert element.exponent_for((1, 1, 1)) == -7

    def test_approximant_is_periodic_on_each_tower(self, towers, T, markers):
        assert towers.check_periodicity(T, markers, 3)

    def test_agreement_only_grows(self, towers, T, markers, binary):
        sampler = SamplingService(7)
        points = sampler.points(binary, 24, head_length=6)
        assert towers.check_monotone_agreement(T, markers, 2, points)
        assert towers.check_monotone_agreement(T, markers, 3, points)

    def test_approximant_consists_of_periodic_points(self, towers, P3, binary):
        assert towers.periodic_cells(P3, 3) == sorted(binary.words(3))

    def test_odometer_is_aperiodic(self, towers, T):
        assert towers.periodic_cells(T, 4) == []
        towers.ensure_aperiodic(T, 4)

    def test_identity_is_periodic(self, towers, identity):
        assert towers.periodic_cells(identity)
        with pytest.raises(PeriodicityError):
            towers.ensure_aperiodic(identity)


class TestRokhlinSets:
    def test_first_deep_enough_level(self, towers, T, markers, uniform, events):
        certificate = towers.rokhlin_set(T, markers, 3, EPS, [uniform])
        assert certificate.level == 4
        assert certificate.coverage == (Fraction(15, 16),)
        assert certificate.disjoint and certificate.success
        event = events.last(CertificateIssued)
        assert event.success
        assert event.summary["level"] == "4"

    def test_forced_level(self, towers, T, markers, uniform):
        certificate = towers.rokhlin_set(T, markers, 3, EPS, [uniform], level=3)
        assert certificate.level == 3
        assert certificate.coverage == (Fraction(3, 4),)
        assert certificate.success
        assert not certificate.bounds.meets

    def test_level_bounds(self, towers, T, markers, uniform):
        bounds = towers.level_bounds(T, markers, 3, 3, EPS, [uniform])
        assert bounds.short_mass == (0,)
        assert bounds.leftover_mass == (Fraction(1, 4),)
        assert not bounds.meets

    def test_scan_stops_at_the_first_level_that_meets(self, towers, T, markers, uniform):
        scanned = towers.scan_levels(T, markers, 3, EPS, [uniform])
        assert [b.level for b in scanned] == [1, 2, 3, 4]
        assert [b.meets for b in scanned] == [False, False, False, True]

    def test_scan_without_a_qualifying_level(self, towers, T, binary, uniform):
        shallow = towers.odometer_markers(binary, 3)
        scanned = towers.scan_levels(T, shallow, 3, Fraction(1, 10), [uniform])
        assert len(scanned) == 3
        assert not any(b.meets for b in scanned)

    def test_short_towers_count_against_the_level(self, towers, T, markers, uniform):
        bounds = towers.level_bounds(T, markers, 1, 3, EPS, [uniform])
        assert bounds.short_mass == (1,)

    def test_infeasible_request_carries_the_best_certificate(self, towers, T, binary, uniform):
        shallow = towers.odometer_markers(binary, 3)
        with pytest.raises(RokhlinInfeasibleError) as excinfo:
            towers.rokhlin_set(T, shallow, 3, Fraction(1, 10), [uniform])
        assert excinfo.value.best.level == 2
        assert excinfo.value.best.coverage == (Fraction(3, 4),)

    @pytest.mark.parametrize("eps", [Fraction(0), Fraction(1), Fraction(3, 2)])
    def test_eps_must_lie_inside_the_unit_interval(self, towers, T, markers, uniform, eps):
        with pytest.raises(ValueError):
            towers.rokhlin_set(T, markers, 3, eps, [uniform])

    def test_m_must_be_positive(self, towers, T, markers, uniform):
        with pytest.raises(ValueError):
            towers.rokhlin_from_level(T, markers, 2, 0, EPS, [uniform])

    def test_periodic_maps_are_refused(self, towers, identity, binary, uniform):
        M = _half_markers(identity, binary)
        with pytest.raises(PeriodicityError):
            towers.rokhlin_set(identity, M, 2, EPS, [uniform])

    def test_tower_inventory(self, towers, T, markers, uniform):
        certificate = towers.rokhlin_set(T, markers, 3, EPS, [uniform], level=2)
        assert [(t.height, t.masses) for t in certificate.towers] == [(4, (Fraction(1, 4),))]
        assert certificate.model_dump()["coverage"] == ["3/4"]


class TestDiagramFromMarkers:
    def test_odometer_markers_give_the_odometer_diagram(self, towers, bratteli, T, markers):
        construction, coordinate = towers.diagram_from_markers(T, markers, 3)
        assert construction.diagram.vertex_counts == (1, 1, 1, 1)
        assert construction.tower_heights == ((2,), (4,), (8,))
        assert construction.conjugacy_holds
        assert construction.sampled > 0
        assert bratteli.validate(construction.diagram).is_valid

    @pytest.mark.parametrize(
        "x", [Point.zero(), Point.from_word((1, 0, 1)), Point(head=(0, 1), period=(1, 0))], ids=str
    )
    def test_coordinates_read_the_digits(self, towers, T, markers, x):
        _, coordinate = towers.diagram_from_markers(T, markers, 3)
        assert coordinate(x).labels == x.prefix(3)

    def test_split_bases(self, towers, T, markers):
        construction, _ = towers.diagram_from_markers(T, markers, 3, split_bases=True)
        assert construction.diagram.vertex_counts == (1, 2, 2, 1)
        assert construction.tower_heights == ((2, 2), (4, 4), (8,))
        assert construction.conjugacy_holds

    def test_depth_must_lie_inside_the_markers(self, towers, T, markers):
        with pytest.raises(ValueError):
            towers.diagram_from_markers(T, markers, 0)
        with pytest.raises(ValueError):
            towers.diagram_from_markers(T, markers, 7)

    def test_markers_must_nest(self, towers, T, binary):
        with pytest.raises(NestingError):
            towers.diagram_from_markers(T, _split_markers(T, binary), 2)
