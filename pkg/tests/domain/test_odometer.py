from fractions import Fraction

import pytest

from app.domain.entities.adic import AdicInt, Translation
from app.domain.entities.paths import LazyPath
from app.domain.entities.symbolic import Point, SeqSpace
from app.domain.models.errors import LevelOutOfRangeError
from app.infrastructure.codecs import DiagramCodec

pytestmark = pytest.mark.unit

MIXED = SeqSpace(head=(3,), period=(2,))


class TestAdicArithmetic:
    def test_from_int_uses_mixed_radix_digits(self):
        five = AdicInt.from_int(MIXED, 5)
        assert five.value == Point.from_word((2, 1))
        assert str(five) == "21(0)@3(2)"

    def test_add_one_carries(self, odometer, binary):
        three = AdicInt.from_int(binary, 3)
        assert odometer.add_one(three) == AdicInt.from_int(binary, 4)

    def test_minus_one_is_all_ones(self, odometer, binary):
        assert odometer.neg(AdicInt.one(binary)).value == Point(period=(1,))

    def test_sub_inverts_add(self, odometer):
        x = AdicInt(space=MIXED, value=Point(head=(2,), period=(0, 1)))
        b = AdicInt.from_int(MIXED, 7)
        assert odometer.sub(odometer.add(x, b), b) == x

    def test_adic_metric(self, odometer, binary):
        zero, four = AdicInt.zero(binary), AdicInt.from_int(binary, 4)
        assert odometer.adic_metric(zero, four) == Fraction(1, 3)
        assert odometer.adic_metric(four, four) == 0
        assert odometer.adic_metric(zero, AdicInt.one(binary)) == 1

    def test_digits_out_of_range_are_rejected(self, binary):
        with pytest.raises(ValueError):
            AdicInt(space=binary, value=Point.from_word((2,)))


class TestOdometerMaps:
    def test_exceptional_point_of_the_binary_odometer(self, odometer, binary):
        assert odometer.exceptional_points(AdicInt.one(binary)) == [
            (Point(period=(1,)), Point.zero())
        ]

    def test_ternary_carry_exception(self, odometer):
        ternary = SeqSpace.constant(3)
        assert odometer.exceptional_points(AdicInt.one(ternary)) == [
            (Point(period=(2,)), Point.zero())
        ]

    def test_translation_object(self, odometer, symbolic, binary):
        T2 = odometer.translation(Translation(b=AdicInt.from_int(binary, 2)))
        assert symbolic.equivalent(T2, symbolic.power(odometer.odometer_map(binary), 2))


class TestVershikBridge:
    def test_binary_diagram_matches_the_fixture(self, odometer, binary, fixtures_dir):
        D = odometer.to_vershik_diagram(binary, 3)
        assert D.vertex_counts == (1, 1, 1, 1)
        assert len(D.level_edges(2)) == 2
        assert D.is_stationary
        expected = (fixtures_dir / "diagrams" / "odometer2.bbd").read_text(encoding="utf-8")
        assert DiagramCodec().serialize(D) == expected

    def test_mixed_radix_diagram(self, odometer, fixtures_dir):
        D = odometer.to_vershik_diagram(MIXED, 2)
        expected = (fixtures_dir / "diagrams" / "odometer_mixed.bbd").read_text(encoding="utf-8")
        assert DiagramCodec().serialize(D) == expected

    def test_diagram_without_generator_before_the_head_ends(self, odometer):
        D = odometer.to_vershik_diagram(SeqSpace(head=(3, 3), period=(2,)), 1)
        assert D.generator is None

    def test_diagram_needs_a_level(self, odometer, binary):
        with pytest.raises(LevelOutOfRangeError):
            odometer.to_vershik_diagram(binary, 0)

    def test_vershik_successor_is_adding_one(self, odometer, vershik, binary):
        D = odometer.to_vershik_diagram(binary, 3)
        path = vershik.path_from_labels(D, (1, 1, 0))
        assert vershik.rank(D, path) == 3
        y = LazyPath(diagram=D, head=path)
        assert vershik.switch_level(y) == 3
        assert vershik.successor(y).prefix(3).labels == (0, 0, 1)
