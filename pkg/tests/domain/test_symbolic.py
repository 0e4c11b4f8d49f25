"""Sequence spaces, points, cylinder unions and rule-table automorphisms."""

from fractions import Fraction

import pytest

from app.domain.entities.cylmap import CylMap, Rule
from app.domain.entities.measures import Atomic, Bernoulli
from app.domain.entities.symbolic import CylinderUnion, Point, SeqSpace, merge_cells
from app.domain.models.errors import (
    DepthOverflowError,
    OverlapError,
    SpaceMismatchError,
    UnresolvedError,
)
from app.domain.models.value_objects import Budgets
from app.domain.services.sampling_service import SamplingService
from app.domain.services.symbolic_service import SymbolicService

pytestmark = pytest.mark.unit


class TestPoint:
    def test_trailing_period_is_folded_into_the_head(self):
        assert Point(head=(1, 0, 1, 0), period=(1, 0)) == Point(period=(1, 0))
        assert Point(head=(1, 1, 0), period=(0,)) == Point.from_word((1, 1))

    def test_text_and_digits(self):
        x = Point.from_word((1, 1, 0))
        assert x.text() == "11(0)"
        assert x.prefix(4) == (1, 1, 0, 0)
        assert Point.unit(2).digit(2) == 1
        assert Point.zero().is_zero

    def test_truncate_below_clears_the_low_digits(self):
        x = Point(head=(1, 1), period=(1,))
        assert x.truncate_below(2) == Point(head=(0, 0), period=(1,))


class TestSeqSpace:
    def test_mixed_radix_sizes(self):
        space = SeqSpace(head=(3,), period=(2,))
        assert space.sizes(4) == (3, 2, 2, 2)
        assert space.cell_count(3) == 12
        assert space.uniform_mass((0, 1)) == Fraction(1, 6)

    def test_addition_carries(self, binary):
        assert binary.add(Point.from_word((1, 1, 0)), Point.unit(0)) == Point.from_word((0, 0, 1))
        assert binary.add(Point(period=(1,)), Point.unit(0)) == Point.zero()

    def test_negation_is_an_additive_inverse(self, binary):
        x = Point(head=(1, 0), period=(0, 1))
        assert binary.add(x, binary.negate(x)) == Point.zero()

    def test_first_difference(self, binary):
        assert binary.first_difference(Point.from_word((1, 0, 1)), Point.from_word((1, 0, 0))) == 2
        assert binary.first_difference(Point.zero(), Point.zero()) is None

    def test_digit_bounds_are_checked(self, binary):
        with pytest.raises(ValueError):
            binary.validate_word((0, 2))

    def test_spaces_must_match(self, binary):
        with pytest.raises(SpaceMismatchError):
            binary.ensure_same(SeqSpace.constant(3))

    def test_alphabets_of_size_one_are_rejected(self):
        with pytest.raises(ValueError):
            SeqSpace.constant(1)


class TestCylinderUnion:
    def test_merge_cells_joins_full_sibling_families(self, binary):
        cells = [(0, 0), (0, 1), (1, 0)]
        assert merge_cells(binary, cells) == ((0,), (1, 0))

    def test_overlapping_words_are_rejected(self, binary):
        with pytest.raises(OverlapError):
            CylinderUnion.of(binary, (0,), (0, 1)).ensure_disjoint()

    def test_cells_refine_to_depth(self, binary):
        A = CylinderUnion.of(binary, (0,))
        assert A.cells(2) == frozenset({(0, 0), (0, 1)})

    def test_point_membership(self, binary):
        A = CylinderUnion(space=binary, words=((1, 1),), points=(Point.zero(),))
        assert A.contains_point(Point.from_word((1, 1, 0, 1)))
        assert A.contains_point(Point.zero())
        assert not A.contains_point(Point.from_word((0, 1)))

    def test_empty_union_text(self, binary):
        assert str(CylinderUnion.empty(binary)) == "∅"


class TestCylMap:
    def test_incomplete_code_is_rejected(self, binary):
        with pytest.raises(ValueError, match="cover"):
            CylMap(space=binary, rules=(Rule(source=(0,), target=(0,)),))

    def test_rule_lengths_must_agree(self):
        with pytest.raises(ValueError):
            Rule(source=(0,), target=(1, 0))

    def test_odometer_table(self, T):
        assert T.is_lazy
        assert T.table_depth == 0
        assert T.rules[0].addend == Point.unit(0)


class TestSymbolicService:
    def test_rules_at_expands_the_odometer(self, symbolic, T):
        expansion = symbolic.rules_at(T, 2)
        assert expansion.rules == (((0,), (1,)), ((1, 0), (0, 1)))
        assert expansion.unresolved == ((1, 1),)

    def test_rules_at_for_translation_by_two(self, symbolic, binary):
        shift = symbolic.translation(binary, Point.unit(1))
        expansion = symbolic.rules_at(shift, 2)
        assert expansion.rules == (((0, 0), (0, 1)), ((1, 0), (1, 1)))
        assert expansion.unresolved == ((0, 1), (1, 1))

    def test_exceptional_points_of_the_odometer(self, symbolic, T):
        assert symbolic.exceptional_points(T) == [(Point(period=(1,)), Point.zero())]

    def test_group_identities(self, symbolic, T, binary):
        shift = symbolic.translation(binary, Point.unit(1))
        assert symbolic.equivalent(symbolic.power(T, 2), shift)
        assert symbolic.equivalent(symbolic.compose(T, symbolic.invert(T)), CylMap.identity(binary))
        assert symbolic.invert(T).rules[0].addend == Point(period=(1,))

    def test_apply_point(self, symbolic, T):
        assert symbolic.apply_point(T, Point.from_word((1, 1, 0))) == Point.from_word((0, 0, 1))
        assert symbolic.apply_point(T, Point(period=(1,))) == Point.zero()

    def test_image_of_cylinders(self, symbolic, T, binary):
        assert symbolic.image(T, CylinderUnion.of(binary, (0,))).words == ((1,),)
        assert symbolic.image(T, CylinderUnion.of(binary, (1,))).words == ((0,),)

    def test_cell_permutation_needs_the_table_depth(self, symbolic, P3):
        with pytest.raises(UnresolvedError):
            symbolic.cell_permutation(P3, 2)
        perm = symbolic.cell_permutation(P3, 3)
        assert perm[(1, 1, 1)] == ((0, 0, 0), Point.zero())

    def test_diff_set_against_the_approximant(self, symbolic, T, P3):
        at_three = symbolic.diff_set(P3, T, 3)
        assert at_three.different == ((1, 1, 1),)
        assert len(at_three.equal) == 7
        at_two = symbolic.diff_set(P3, T, 2)
        assert at_two.unresolved == ((1, 1),)
        assert at_two.class_of((0, 1)) == "equal"

    def test_e_set_collects_both_directions(self, symbolic, T, P3):
        assert symbolic.e_set(P3, T, 3).different == ((0, 0, 0), (1, 1, 1))

    def test_forward_difference(self, symbolic, T, P3, binary):
        assert symbolic.forward_difference(P3, T) == CylinderUnion.of(binary, (1, 1, 1))

    def test_measure_of_disjoint_union(self, symbolic, binary, uniform):
        A = CylinderUnion.of(binary, (0,), (1, 1))
        assert symbolic.measure(uniform, A) == Fraction(3, 4)

    def test_measure_counts_uncovered_atoms(self, symbolic, binary):
        atoms = ((Point.zero(), Fraction(1, 2)), (Point(period=(1,)), Fraction(1, 2)))
        nu = Atomic(space=binary, atoms=atoms)
        A = CylinderUnion(space=binary, words=((0,),), points=(Point(period=(1,)),))
        assert symbolic.measure(nu, A) == 1

    def test_measure_rejects_overlaps(self, symbolic, binary, uniform):
        with pytest.raises(OverlapError):
            symbolic.measure(uniform, CylinderUnion.of(binary, (0,), (0, 0)))

    def test_pushforward_of_uniform_is_uniform(self, symbolic, T, binary, uniform):
        A = CylinderUnion.of(binary, (1, 0))
        assert symbolic.pushforward_measure(uniform, T, A) == Fraction(1, 4)

    def test_piecewise_power_rebuilds_the_odometer(self, symbolic, T):
        element = symbolic.piecewise(T, [((0,), 1), ((1,), 1)])
        assert element.exponent_for((0, 1)) == 1
        assert symbolic.equivalent(symbolic.to_cylmap(element), T)

    def test_colliding_pieces_are_not_a_bijection(self, symbolic, T):
        with pytest.raises(ValueError):
            symbolic.to_cylmap(symbolic.piecewise(T, [((0,), 1), ((1,), 0)]))

    def test_rule_budget_bounds_composition(self, T, P3):
        tight = SymbolicService(budgets=Budgets(rule_budget=2))
        with pytest.raises(DepthOverflowError):
            tight.compose(P3, P3)

    def test_spaces_must_match(self, symbolic, T, odometer):
        with pytest.raises(SpaceMismatchError):
            symbolic.compose(T, odometer.odometer_map(SeqSpace.constant(3)))

    def test_normalize_merges_sibling_rules(self, symbolic, binary):
        split = CylMap(
            space=binary,
            rules=(Rule(source=(0,), target=(0,)), Rule(source=(1,), target=(1,))),
        )
        assert symbolic.normalize(split).rules == (Rule(source=(), target=()),)


class TestRandomTables:
    @pytest.mark.parametrize("seed", range(6))
    def test_inverse_undoes_a_lazy_table(self, symbolic, binary, seed):
        sampler = SamplingService(seed)
        S = sampler.cylmap(sampler.rng(), binary, 3, lazy=True)
        assert symbolic.equivalent(symbolic.compose(S, symbolic.invert(S)), CylMap.identity(binary))
        assert symbolic.equivalent(symbolic.normalize(S), S)

    @pytest.mark.parametrize("seed", range(4))
    def test_composition_is_associative(self, symbolic, seed):
        space = SeqSpace.constant(3)
        sampler = SamplingService(seed)
        rng = sampler.rng()
        A, B, C = (sampler.cylmap(rng, space, 2) for _ in range(3))
        left = symbolic.compose(symbolic.compose(A, B), C)
        right = symbolic.compose(A, symbolic.compose(B, C))
        assert symbolic.equivalent(left, right)
