"""Path ranks, the Vershik map and lazy infinite paths."""

import pytest

from app.domain.entities.adic import AdicInt
from app.domain.entities.paths import DigitTail, ExtremeTail, LazyPath
from app.domain.entities.symbolic import Point
from app.domain.models.errors import (
    BudgetExceededError,
    IndexOutOfRangeError,
    LevelOutOfRangeError,
    VertexNotFoundError,
)
from app.domain.services.sampling_service import SamplingService

pytestmark = pytest.mark.unit


@pytest.fixture
def mixed(load_diagram):
    return load_diagram("heights_mixed.bbd")


@pytest.fixture
def odometer_diagram(load_diagram):
    return load_diagram("odometer2.bbd")


class TestRanks:
    def test_heights_count_paths(self, vershik, mixed):
        assert mixed.heights(1) == (2, 1)
        assert mixed.heights(2) == (3, 3)
        assert vershik.height(mixed, 3, 0) == 6

    def test_rank_of_a_labelled_path(self, vershik, mixed):
        path = vershik.path_from_labels(mixed, (1, 1, 0))
        assert path.vertices == (0, 0, 0)
        assert vershik.rank(mixed, path) == 2

    def test_vertices_disambiguate_labels(self, vershik, mixed):
        with pytest.raises(VertexNotFoundError, match="ambiguous"):
            vershik.path_from_labels(mixed, (0, 1, 1))
        path = vershik.path_from_labels(mixed, (0, 1, 1), (1, 1, 0))
        assert vershik.rank(mixed, path) == 5
        assert path == vershik.maximal_path(mixed, 3, 0)

    def test_unknown_label(self, vershik, odometer_diagram):
        with pytest.raises(VertexNotFoundError, match="unknown"):
            vershik.path_from_labels(odometer_diagram, (2,))

    def test_enumeration_follows_rank_order(self, vershik, mixed):
        paths = list(vershik.enumerate_paths(mixed, 3, 0))
        assert len(paths) == 6
        for i, path in enumerate(paths):
            assert vershik.rank(mixed, path) == i
            assert vershik.unrank(mixed, 3, 0, i) == path

    def test_unrank_out_of_range(self, vershik, odometer_diagram):
        with pytest.raises(IndexOutOfRangeError):
            vershik.unrank(odometer_diagram, 3, 0, 8)

    def test_extreme_paths(self, vershik, odometer_diagram):
        assert vershik.minimal_path(odometer_diagram, 3, 0).labels == (0, 0, 0)
        assert vershik.maximal_path(odometer_diagram, 3, 0).labels == (1, 1, 1)


class TestSuccessor:
    def test_successor_on_a_finite_diagram(self, vershik, mixed):
        y = LazyPath(diagram=mixed, head=vershik.path_from_labels(mixed, (1, 1, 0)))
        following = vershik.successor(y).prefix(3)
        assert following.text(with_vertices=True) == "0,0,1@0.1.0"
        assert vershik.rank(mixed, following) == 3

    def test_successor_walks_the_ranks(self, vershik, mixed):
        paths = list(vershik.enumerate_paths(mixed, 3, 0))
        for current, expected in zip(paths, paths[1:]):
            y = LazyPath(diagram=mixed, head=current)
            assert vershik.successor(y).prefix(3) == expected
            assert vershik.predecessor(LazyPath(diagram=mixed, head=expected)).prefix(3) == current

    def test_maximal_path_of_a_truncation_has_no_successor(self, vershik, mixed):
        y = LazyPath(diagram=mixed, head=vershik.maximal_path(mixed, 3, 0))
        with pytest.raises(LevelOutOfRangeError):
            vershik.successor(y)

    @pytest.mark.parametrize(
        "point",
        [
            Point.zero(),
            Point.from_word((1,)),
            Point.from_word((1, 1)),
            Point.from_word((0, 1, 0, 1)),
            Point(head=(1, 1, 1), period=(0, 1)),
        ],
        ids=str,
    )
    def test_digit_paths_move_like_the_odometer(
        self, vershik, odometer, odometer_diagram, binary, point
    ):
        y = LazyPath(diagram=odometer_diagram, tail=DigitTail(point=point))
        image = odometer.add_one(AdicInt(space=binary, value=point)).value
        assert vershik.successor(y).prefix(8).labels == image.prefix(8)
        assert vershik.predecessor(vershik.successor(y)).prefix(8) == y.prefix(8)

    def test_all_maximal_path_exhausts_the_budget(self, vershik, odometer_diagram):
        y = LazyPath(diagram=odometer_diagram, tail=ExtremeTail(greatest=True), depth_budget=16)
        with pytest.raises(BudgetExceededError):
            vershik.successor(y)

    def test_switch_level_and_coords(self, vershik, odometer_diagram):
        y = LazyPath(diagram=odometer_diagram, tail=DigitTail(point=Point.from_word((1, 1))))
        assert vershik.switch_level(y) == 3
        assert vershik.coords(y, 3).pairs == ((1, 0), (3, 0), (3, 0))

    def test_coords_respect_the_budget(self, vershik, odometer_diagram):
        y = LazyPath(diagram=odometer_diagram, depth_budget=4)
        with pytest.raises(BudgetExceededError):
            vershik.coords(y, 5)


class TestSampledDiagrams:
    @pytest.mark.parametrize("seed", range(20))
    def test_rank_unrank_and_successor(self, vershik, bratteli, seed):
        sampler = SamplingService(seed)
        D = sampler.diagram(sampler.rng(), levels=3)
        assert bratteli.validate(D).is_valid
        for v in range(D.vertex_count(3)):
            paths = list(vershik.enumerate_paths(D, 3, v))
            assert len(paths) == D.heights(3)[v]
            for i, path in enumerate(paths):
                assert vershik.rank(D, path) == i
            for current, expected in zip(paths, paths[1:]):
                assert vershik.successor(LazyPath(diagram=D, head=current)).prefix(3) == expected
