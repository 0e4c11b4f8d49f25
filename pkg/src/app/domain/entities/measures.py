"""Probability measures on sequence spaces with exact rational masses."""

from fractions import Fraction
from math import lcm
from typing import List, Literal, Sequence, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from typing_extensions import Annotated

from ..models.value_objects import Word
from .symbolic import Point, SeqSpace

Vector = Tuple[Fraction, ...]
Matrix = Tuple[Vector, ...]


def _as_vector(values: Sequence) -> Vector:
    return tuple(Fraction(v) for v in values)


def _check_distribution(values: Vector, where: str) -> None:
    if any(v < 0 for v in values):
        raise ValueError(f"Negative probability in {where}")
    if sum(values) != 1:
        raise ValueError(f"Probabilities in {where} sum to {sum(values)}, not 1")


class _MeasureBase(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    space: SeqSpace

    def cylinder_mass(self, word: Word) -> Fraction:
        raise NotImplementedError

    def point_mass(self, point: Point) -> Fraction:
        raise NotImplementedError

    @property
    def has_atoms(self) -> bool:
        raise NotImplementedError


class Bernoulli(_MeasureBase):
    """Product measure with eventually periodic coordinate distributions"""

    kind: Literal["bernoulli"] = "bernoulli"
    head: Tuple[Vector, ...] = ()
    period: Tuple[Vector, ...]

    @field_validator("head", "period", mode="before")
    @classmethod
    def _to_fractions(cls, v):
        return tuple(_as_vector(vec) for vec in v)

    @model_validator(mode="after")
    def _rows_are_distributions(self) -> "Bernoulli":
        if not self.period:
            raise ValueError("Bernoulli measure needs a repeating block")
        settle, cycle = self._horizon()
        for t in range(settle + cycle):
            vec = self.vector(t)
            if len(vec) != self.space.size(t):
                raise ValueError(
                    f"Coordinate {t} has {len(vec)} probabilities for alphabet size {self.space.size(t)}"
                )
            _check_distribution(vec, f"coordinate {t}")
        return self

    @classmethod
    def uniform(cls, space: SeqSpace) -> "Bernoulli":
        return cls(
            space=space,
            head=tuple((Fraction(1, s),) * s for s in space.head),
            period=tuple((Fraction(1, s),) * s for s in space.period),
        )

    def _horizon(self, *points: Point) -> Tuple[int, int]:
        settle = max([len(self.head), len(self.space.head)] + [len(p.head) for p in points])
        cycle = lcm(len(self.period), len(self.space.period), *(len(p.period) for p in points))
        return settle, cycle

    def vector(self, t: int) -> Vector:
        if t < len(self.head):
            return self.head[t]
        return self.period[(t - len(self.head)) % len(self.period)]

    def cylinder_mass(self, word: Word) -> Fraction:
        mass = Fraction(1)
        for t, digit in enumerate(word):
            mass *= self.vector(t)[digit]
        return mass

    def point_mass(self, point: Point) -> Fraction:
        settle, cycle = self._horizon(point)
        block = Fraction(1)
        for t in range(settle, settle + cycle):
            block *= self.vector(t)[point.digit(t)]
        if block != 1:
            return Fraction(0)
        return self.cylinder_mass(point.prefix(settle))

    @property
    def has_atoms(self) -> bool:
        settle, cycle = self._horizon()
        return all(max(self.vector(t)) == 1 for t in range(settle, settle + cycle))

    @property
    def is_uniform(self) -> bool:
        settle, cycle = self._horizon()
        return all(len(set(self.vector(t))) == 1 for t in range(settle + cycle))


class Markov(_MeasureBase):
    """Markov measure: initial vector and eventually periodic transition matrices.

    ``step(t)`` for t ≥ 1 maps the digit at t−1 to the digit at t.
    """

    kind: Literal["markov"] = "markov"
    initial: Vector
    head: Tuple[Matrix, ...] = ()
    period: Tuple[Matrix, ...]

    @field_validator("initial", mode="before")
    @classmethod
    def _initial_fractions(cls, v):
        return _as_vector(v)

    @field_validator("head", "period", mode="before")
    @classmethod
    def _matrix_fractions(cls, v):
        return tuple(tuple(_as_vector(row) for row in matrix) for matrix in v)

    @model_validator(mode="after")
    def _rows_are_distributions(self) -> "Markov":
        if not self.period:
            raise ValueError("Markov measure needs a repeating block of transitions")
        if len(self.initial) != self.space.size(0):
            raise ValueError("Initial vector does not match the first alphabet")
        _check_distribution(self.initial, "initial vector")
        settle, cycle = self._horizon()
        for t in range(1, settle + cycle + 1):
            matrix = self.step(t)
            if len(matrix) != self.space.size(t - 1):
                raise ValueError(f"Transition {t} has {len(matrix)} rows")
            for i, row in enumerate(matrix):
                if len(row) != self.space.size(t):
                    raise ValueError(f"Transition {t} row {i} has {len(row)} entries")
                _check_distribution(row, f"transition {t} row {i}")
        return self

    def _horizon(self, *points: Point) -> Tuple[int, int]:
        settle = max(
            [len(self.head) + 1, len(self.space.head) + 1] + [len(p.head) + 1 for p in points]
        )
        cycle = lcm(len(self.period), len(self.space.period), *(len(p.period) for p in points))
        return settle, cycle

    def step(self, t: int) -> Matrix:
        index = t - 1
        if index < len(self.head):
            return self.head[index]
        return self.period[(index - len(self.head)) % len(self.period)]

    def cylinder_mass(self, word: Word) -> Fraction:
        if not word:
            return Fraction(1)
        mass = self.initial[word[0]]
        for t in range(1, len(word)):
            mass *= self.step(t)[word[t - 1]][word[t]]
        return mass

    def point_mass(self, point: Point) -> Fraction:
        settle, cycle = self._horizon(point)
        block = Fraction(1)
        for t in range(settle, settle + cycle):
            block *= self.step(t)[point.digit(t - 1)][point.digit(t)]
        if block != 1:
            return Fraction(0)
        return self.cylinder_mass(point.prefix(settle))

    @property
    def has_atoms(self) -> bool:
        settle, cycle = self._horizon()
        reachable = {a for a, p in enumerate(self.initial) if p > 0}
        for t in range(1, settle):
            matrix = self.step(t)
            reachable = {b for a in reachable for b, p in enumerate(matrix[a]) if p > 0}
        # nodes are (phase, digit at time settle - 1 + phase)
        frontier = [(0, a) for a in reachable]
        seen = set(frontier)
        while frontier:
            phase, a = frontier.pop()
            matrix = self.step(settle + phase)
            for b, p in enumerate(matrix[a]):
                node = ((phase + 1) % cycle, b)
                if p > 0 and node not in seen:
                    seen.add(node)
                    frontier.append(node)
        for start in seen:
            node, visited = start, set()
            while node not in visited:
                visited.add(node)
                phase, a = node
                row = self.step(settle + phase)[a]
                sure = [b for b, p in enumerate(row) if p == 1]
                if not sure:
                    break
                node = ((phase + 1) % cycle, sure[0])
            else:
                return True
        return False


class Atomic(_MeasureBase):
    """Finite convex combination of point masses"""

    kind: Literal["atomic"] = "atomic"
    atoms: Tuple[Tuple[Point, Fraction], ...]

    @field_validator("atoms", mode="before")
    @classmethod
    def _weights_to_fractions(cls, v):
        return tuple((point, Fraction(weight)) for point, weight in v)

    @model_validator(mode="after")
    def _weights_are_distribution(self) -> "Atomic":
        points = [p for p, _ in self.atoms]
        if len(set(points)) != len(points):
            raise ValueError("Atoms must be pairwise distinct points")
        for point in points:
            self.space.validate_point(point)
        weights = tuple(w for _, w in self.atoms)
        if any(w <= 0 for w in weights):
            raise ValueError("Atom weights must be positive")
        _check_distribution(weights, "atom weights")
        return self

    @property
    def weights(self) -> List[Fraction]:
        return [w for _, w in self.atoms]

    def cylinder_mass(self, word: Word) -> Fraction:
        return sum((w for p, w in self.atoms if p.prefix(len(word)) == word), Fraction(0))

    def point_mass(self, point: Point) -> Fraction:
        return sum((w for p, w in self.atoms if p == point), Fraction(0))

    @property
    def has_atoms(self) -> bool:
        return True


class Mixture(_MeasureBase):
    """Finite convex combination of measures"""

    kind: Literal["mixture"] = "mixture"
    components: Tuple[Tuple[Fraction, "MeasureSpec"], ...]

    @field_validator("components", mode="before")
    @classmethod
    def _weights_to_fractions(cls, v):
        return tuple((Fraction(weight), measure) for weight, measure in v)

    @model_validator(mode="after")
    def _weights_are_distribution(self) -> "Mixture":
        weights = tuple(w for w, _ in self.components)
        _check_distribution(weights, "mixture weights")
        for _, measure in self.components:
            self.space.ensure_same(measure.space)
        return self

    def cylinder_mass(self, word: Word) -> Fraction:
        return sum((w * m.cylinder_mass(word) for w, m in self.components), Fraction(0))

    def point_mass(self, point: Point) -> Fraction:
        return sum((w * m.point_mass(point) for w, m in self.components), Fraction(0))

    @property
    def has_atoms(self) -> bool:
        return any(w > 0 and m.has_atoms for w, m in self.components)


MeasureSpec = Annotated[Union[Bernoulli, Markov, Atomic, Mixture], Field(discriminator="kind")]

Mixture.model_rebuild()
