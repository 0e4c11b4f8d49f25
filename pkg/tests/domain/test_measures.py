from fractions import Fraction

import pytest

from app.domain.entities.measures import Atomic, Bernoulli, Markov, Mixture
from app.domain.entities.symbolic import Point, SeqSpace

pytestmark = pytest.mark.unit

HALF = Fraction(1, 2)


class TestBernoulli:
    def test_uniform_masses(self, uniform):
        assert uniform.is_uniform
        assert uniform.cylinder_mass((0, 1)) == Fraction(1, 4)
        assert uniform.point_mass(Point.zero()) == 0
        assert not uniform.has_atoms

    def test_uniform_on_mixed_radix(self):
        mu = Bernoulli.uniform(SeqSpace(head=(3,), period=(2,)))
        assert mu.cylinder_mass((2, 1, 0)) == Fraction(1, 12)

    def test_biased_product(self, binary):
        mu = Bernoulli(space=binary, period=((Fraction(1, 3), Fraction(2, 3)),))
        assert mu.cylinder_mass((1, 1, 0)) == Fraction(4, 27)
        assert not mu.is_uniform

    def test_degenerate_coordinates_give_atoms(self, binary):
        mu = Bernoulli(space=binary, period=((1, 0),))
        assert mu.has_atoms
        assert mu.point_mass(Point.zero()) == 1

    def test_rows_must_be_distributions(self, binary):
        with pytest.raises(ValueError):
            Bernoulli(space=binary, period=((HALF, Fraction(1, 3)),))


class TestMarkov:
    def test_golden_mean_chain(self, binary):
        mu = Markov(space=binary, initial=(HALF, HALF), period=(((HALF, HALF), (1, 0)),))
        assert mu.cylinder_mass((1, 1)) == 0
        assert mu.cylinder_mass((0, 1)) == Fraction(1, 4)
        assert mu.cylinder_mass((1, 0)) == HALF
        assert not mu.has_atoms

    def test_identity_transitions_concentrate_on_constant_points(self, binary):
        mu = Markov(space=binary, initial=(HALF, HALF), period=(((1, 0), (0, 1)),))
        assert mu.has_atoms
        assert mu.point_mass(Point(period=(1,))) == HALF


class TestAtomicAndMixture:
    def test_atomic_masses(self, binary):
        nu = Atomic(space=binary, atoms=((Point.zero(), HALF), (Point(period=(1,)), HALF)))
        assert nu.weights == [HALF, HALF]
        assert nu.cylinder_mass((0, 0)) == HALF
        assert nu.point_mass(Point.from_word((1,))) == 0
        assert nu.has_atoms

    def test_atoms_must_be_distinct(self, binary):
        with pytest.raises(ValueError):
            Atomic(space=binary, atoms=((Point.zero(), HALF), (Point.zero(), HALF)))

    def test_mixture_is_a_convex_combination(self, binary, uniform):
        nu = Atomic(space=binary, atoms=((Point.zero(), 1),))
        mix = Mixture(space=binary, components=((HALF, uniform), (HALF, nu)))
        assert mix.cylinder_mass((0,)) == Fraction(3, 4)
        assert mix.point_mass(Point.zero()) == HALF
        assert mix.has_atoms

    def test_mixture_weights_sum_to_one(self, binary, uniform):
        with pytest.raises(ValueError):
            Mixture(space=binary, components=((HALF, uniform),))
