"""Sequence spaces, eventually periodic points and cylinder sets.

Digits are stored least-significant first: position t carries a digit in
``range(space.size(t))`` and weighs ``p_{t-1} = λ_0 ⋯ λ_{t-1}``.
"""

from fractions import Fraction
from itertools import product
from math import lcm
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..models.errors import DigitBoundsError, OverlapError, SpaceMismatchError
from ..models.value_objects import Word


def normal_form(head: Sequence[int], period: Sequence[int]) -> Tuple[Word, Word]:
    """Minimal head and primitive period of an eventually periodic stream."""
    block = list(period)
    if not block:
        raise ValueError("Repeating block cannot be empty")
    n = len(block)
    for d in range(1, n + 1):
        if n % d == 0 and block[:d] * (n // d) == block:
            block = block[:d]
            break
    prefix = list(head)
    while prefix and prefix[-1] == block[-1]:
        prefix.pop()
        block = [block[-1]] + block[:-1]
    return tuple(prefix), tuple(block)


def _digit_text(digits: Sequence[int], dotted: bool) -> str:
    if dotted:
        return ".".join(str(d) for d in digits)
    return "".join(str(d) for d in digits)


class Point(BaseModel):
    """An eventually periodic digit stream ``head · period^∞``"""

    model_config = ConfigDict(frozen=True)

    head: Word = ()
    period: Word = (0,)

    @model_validator(mode="before")
    @classmethod
    def _normalize(cls, data):
        if isinstance(data, dict):
            head, period = normal_form(
                tuple(data.get("head", ())), tuple(data.get("period", (0,)))
            )
            if any(d < 0 for d in head + period):
                raise ValueError("Digits must be non-negative")
            data = {**data, "head": head, "period": period}
        return data

    @classmethod
    def zero(cls) -> "Point":
        return cls(head=(), period=(0,))

    @classmethod
    def unit(cls, position: int, value: int = 1) -> "Point":
        """The stream with ``value`` at ``position`` and zeros elsewhere"""
        return cls(head=(0,) * position + (value,), period=(0,))

    @classmethod
    def from_word(cls, word: Sequence[int], period: Sequence[int] = (0,)) -> "Point":
        return cls(head=tuple(word), period=tuple(period))

    def digit(self, t: int) -> int:
        if t < len(self.head):
            return self.head[t]
        return self.period[(t - len(self.head)) % len(self.period)]

    def prefix(self, length: int) -> Word:
        return tuple(self.digit(t) for t in range(length))

    @property
    def is_zero(self) -> bool:
        return not self.head and self.period == (0,)

    def with_prefix(self, word: Sequence[int]) -> "Point":
        """Replace the first ``len(word)`` digits"""
        cut = max(len(word), len(self.head))
        head = tuple(word) + tuple(self.digit(t) for t in range(len(word), cut))
        period = tuple(self.digit(t) for t in range(cut, cut + len(self.period)))
        return Point(head=head, period=period)

    def truncate_below(self, position: int) -> "Point":
        """Zero every digit before ``position``"""
        return self.with_prefix((0,) * position)

    def settles_after(self) -> int:
        return len(self.head)

    def text(self, dotted: bool = False) -> str:
        return f"{_digit_text(self.head, dotted)}({_digit_text(self.period, dotted)})"

    def __str__(self) -> str:
        return self.text(dotted=any(d > 9 for d in self.head + self.period))


class SeqSpace(BaseModel):
    """Mixed-radix sequence space with eventually periodic alphabet sizes"""

    model_config = ConfigDict(frozen=True)

    head: Word = Field(default=(), description="Alphabet sizes before the repeating block")
    period: Word = Field(default=(2,), description="Repeating block of alphabet sizes")

    @model_validator(mode="before")
    @classmethod
    def _normalize(cls, data):
        if isinstance(data, dict):
            head, period = normal_form(
                tuple(data.get("head", ())), tuple(data.get("period", (2,)))
            )
            if any(size < 2 for size in head + period):
                raise ValueError("Every alphabet size must be at least 2")
            data = {**data, "head": head, "period": period}
        return data

    @classmethod
    def constant(cls, size: int) -> "SeqSpace":
        return cls(head=(), period=(size,))

    def size(self, t: int) -> int:
        if t < len(self.head):
            return self.head[t]
        return self.period[(t - len(self.head)) % len(self.period)]

    def sizes(self, depth: int) -> Word:
        return tuple(self.size(t) for t in range(depth))

    def prefix_product(self, t: int) -> int:
        """p_t = λ_0 ⋯ λ_t, with p_{-1} = 1"""
        value = 1
        for i in range(t + 1):
            value *= self.size(i)
        return value

    def cell_count(self, depth: int) -> int:
        return self.prefix_product(depth - 1)

    @property
    def dotted(self) -> bool:
        return any(size > 10 for size in self.head + self.period)

    def describe(self) -> str:
        """lambda-spec text, e.g. ``2`` or ``2.3(4)``"""
        head = ".".join(str(s) for s in self.head)
        period = ".".join(str(s) for s in self.period)
        if not self.head and len(self.period) == 1:
            return period
        return f"{head}({period})"

    def __str__(self) -> str:
        return self.describe()

    def ensure_same(self, other: "SeqSpace") -> None:
        if self != other:
            raise SpaceMismatchError(
                f"Sequence spaces differ: {self.describe()} vs {other.describe()}"
            )

    # -- words ---------------------------------------------------------

    def validate_word(self, word: Sequence[int]) -> Word:
        for t, digit in enumerate(word):
            if not 0 <= digit < self.size(t):
                raise DigitBoundsError(
                    f"Digit {digit} at position {t} outside alphabet of size {self.size(t)}"
                )
        return tuple(word)

    def words(self, depth: int) -> Iterator[Word]:
        """All depth-d words in lexicographic order"""
        return product(*(range(self.size(t)) for t in range(depth)))

    def children(self, word: Word) -> List[Word]:
        return [word + (a,) for a in range(self.size(len(word)))]

    def uniform_mass(self, word: Sequence[int]) -> Fraction:
        return Fraction(1, self.cell_count(len(word)))

    def _horizon(self, *points: Point) -> Tuple[int, int]:
        settle = max([len(self.head)] + [len(p.head) for p in points])
        cycle = lcm(len(self.period), *(len(p.period) for p in points))
        return settle, cycle

    def validate_point(self, point: Point) -> Point:
        settle, cycle = self._horizon(point)
        for t in range(settle + cycle):
            if point.digit(t) >= self.size(t):
                raise DigitBoundsError(
                    f"Digit {point.digit(t)} at position {t} outside alphabet of size {self.size(t)}"
                )
        return point

    # -- adic arithmetic -----------------------------------------------

    def add(self, x: Point, y: Point, carry: int = 0) -> Point:
        """Columnwise sum with carries; the result is again eventually periodic"""
        settle, cycle = self._horizon(x, y)
        digits: List[int] = []
        seen: Dict[Tuple[int, int], int] = {}
        t = 0
        while True:
            if t >= settle:
                key = (carry, (t - settle) % cycle)
                if key in seen:
                    start = seen[key]
                    return Point(head=tuple(digits[:start]), period=tuple(digits[start:]))
                seen[key] = t
            total = x.digit(t) + y.digit(t) + carry
            size = self.size(t)
            digits.append(total % size)
            carry = total // size
            t += 1

    def complement(self, x: Point, start: int = 0) -> Point:
        """Digitwise λ_t − 1 − x_t from ``start`` on, zeros before"""
        settle, cycle = self._horizon(x)
        settle = max(settle, start)
        head = tuple(
            0 if t < start else self.size(t) - 1 - x.digit(t) for t in range(settle)
        )
        period = tuple(self.size(t) - 1 - x.digit(t) for t in range(settle, settle + cycle))
        return Point(head=head, period=period)

    def negate(self, x: Point, start: int = 0) -> Point:
        """Additive inverse of the tail of ``x`` from ``start`` on"""
        if x.truncate_below(start).is_zero:
            return Point.zero()
        return self.add(self.complement(x, start), Point.unit(start))

    def max_point(self, start: int = 0) -> Point:
        """All digits λ_t − 1 from ``start`` on"""
        return self.complement(Point.zero(), start)

    def first_difference(self, x: Point, y: Point, start: int = 0) -> Optional[int]:
        """Least index ≥ start where the digit streams differ"""
        settle, cycle = self._horizon(x, y)
        for t in range(start, max(settle, start) + cycle):
            if x.digit(t) != y.digit(t):
                return t
        return None


class Cylinder(BaseModel):
    """The set of points whose first ``depth`` digits equal ``word``"""

    model_config = ConfigDict(frozen=True)

    word: Word = ()

    @property
    def depth(self) -> int:
        return len(self.word)

    def contains(self, point: Point) -> bool:
        return point.prefix(len(self.word)) == self.word

    def __str__(self) -> str:
        return "[" + "".join(str(d) for d in self.word) + "]"


def merge_cells(space: SeqSpace, words: Iterable[Word]) -> Tuple[Word, ...]:
    """Canonical cover: drop nested words, merge complete sibling families"""
    cells = set(words)
    cells = {w for w in cells if not any(w[:k] in cells for k in range(len(w)))}
    changed = True
    while changed:
        changed = False
        parents: Dict[Word, int] = {}
        for w in cells:
            if w:
                parents[w[:-1]] = parents.get(w[:-1], 0) + 1
        for parent, count in parents.items():
            if count == space.size(len(parent)) and all(
                child in cells for child in space.children(parent)
            ):
                cells.difference_update(space.children(parent))
                cells.add(parent)
                changed = True
                break
    return tuple(sorted(cells))


class CylinderUnion(BaseModel):
    """A finite union of cylinders plus finitely many points"""

    model_config = ConfigDict(frozen=True)

    space: SeqSpace
    words: Tuple[Word, ...] = ()
    points: Tuple[Point, ...] = ()

    @model_validator(mode="after")
    def _digits_in_bounds(self) -> "CylinderUnion":
        for word in self.words:
            self.space.validate_word(word)
        for point in self.points:
            self.space.validate_point(point)
        return self

    @classmethod
    def whole(cls, space: SeqSpace) -> "CylinderUnion":
        return cls(space=space, words=((),))

    @classmethod
    def empty(cls, space: SeqSpace) -> "CylinderUnion":
        return cls(space=space)

    @classmethod
    def of(cls, space: SeqSpace, *words: Sequence[int]) -> "CylinderUnion":
        return cls(space=space, words=tuple(tuple(w) for w in words))

    @classmethod
    def from_cells(cls, space: SeqSpace, cells: Iterable[Word]) -> "CylinderUnion":
        return cls(space=space, words=merge_cells(space, cells))

    @property
    def cylinders(self) -> List[Cylinder]:
        return [Cylinder(word=w) for w in self.words]

    @property
    def max_length(self) -> int:
        return max((len(w) for w in self.words), default=0)

    @property
    def is_empty(self) -> bool:
        return not self.words and not self.points

    def ensure_disjoint(self) -> None:
        ordered = sorted(set(self.words))
        if len(ordered) != len(self.words):
            raise OverlapError("Cylinder listed twice")
        for a, b in zip(ordered, ordered[1:]):
            if b[: len(a)] == a:
                raise OverlapError(f"Cylinders {Cylinder(word=a)} and {Cylinder(word=b)} overlap")

    def cells(self, depth: int) -> FrozenSet[Word]:
        """Refine the cylinder part to depth-d cells"""
        if self.max_length > depth:
            raise ValueError(f"Set has words longer than depth {depth}")
        out = set()
        for word in self.words:
            for tail in product(*(range(self.space.size(t)) for t in range(len(word), depth))):
                out.add(word + tail)
        return frozenset(out)

    def covers_point(self, point: Point) -> bool:
        return any(point.prefix(len(w)) == w for w in self.words)

    def contains_point(self, point: Point) -> bool:
        return self.covers_point(point) or point in self.points

    def normalized(self) -> "CylinderUnion":
        points = tuple(sorted({p for p in self.points if not self.covers_point(p)}, key=str))
        return CylinderUnion(
            space=self.space, words=merge_cells(self.space, self.words), points=points
        )

    def __str__(self) -> str:
        parts = [str(Cylinder(word=w)) for w in self.words] + [f"{{{p}}}" for p in self.points]
        return " ∪ ".join(parts) if parts else "∅"
