"""Automorphisms given by prefix-rewrite tables.

A rule ``u -> w (+ b)`` with ``|u| = |w|`` sends ``u·y`` to ``w·(y + b)``:
the tail is translated by the addend ``b`` (digits of ``b`` before ``|u|``
are zero) with carries running into deeper digits. A zero addend carries the
tail identically. Translations are bijections of the tail, so a table whose
sources and targets are both complete prefix-free codes is a bijection.
"""

from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, PrivateAttr, model_validator

from ..models.errors import BijectivityError
from ..models.value_objects import Word
from .symbolic import Cylinder, Point, SeqSpace


def check_complete_code(space: SeqSpace, words: Sequence[Word], role: str) -> None:
    """Raise unless ``words`` is a complete prefix-free code"""
    ordered = sorted(words)
    for a, b in zip(ordered, ordered[1:]):
        if b[: len(a)] == a:
            raise BijectivityError(
                f"{role} {Cylinder(word=a)} and {Cylinder(word=b)} are not prefix-free"
            )
    total = sum((space.uniform_mass(w) for w in ordered), Fraction(0))
    if total != 1:
        raise BijectivityError(f"{role} cylinders do not cover the space (mass {total})")


class Rule(BaseModel):
    """One prefix rewrite with its tail translation"""

    model_config = ConfigDict(frozen=True)

    source: Word
    target: Word
    addend: Point = Point.zero()

    @model_validator(mode="after")
    def _lengths_agree(self) -> "Rule":
        if len(self.source) != len(self.target):
            raise ValueError(
                f"Rule {self.source} -> {self.target} changes the prefix length"
            )
        if not self.addend.truncate_below(len(self.source)) == self.addend:
            raise ValueError("Addend digits before the rewritten prefix must be zero")
        return self

    @property
    def is_lazy(self) -> bool:
        return not self.addend.is_zero

    def apply_to_word(self, space: SeqSpace, word: Word) -> Tuple[Word, Point]:
        """Image prefix of ``word`` (``len(word) ≥ len(source)``) and the residual addend"""
        start = len(self.source)
        out = list(self.target)
        carry = 0
        for t in range(start, len(word)):
            total = word[t] + self.addend.digit(t) + carry
            size = space.size(t)
            out.append(total % size)
            carry = total // size
        end = len(word)
        residual = self.addend.truncate_below(end)
        if carry:
            residual = space.add(residual, Point.unit(end, carry))
        return tuple(out), residual


class CylMap(BaseModel):
    """A bijection of a sequence space given by a finite rule table"""

    model_config = ConfigDict(frozen=True)

    space: SeqSpace
    rules: Tuple[Rule, ...]

    _by_source: Dict[Word, Rule] = PrivateAttr(default_factory=dict)

    @model_validator(mode="after")
    def _table_is_bijective(self) -> "CylMap":
        for rule in self.rules:
            self.space.validate_word(rule.source)
            self.space.validate_word(rule.target)
            self.space.validate_point(rule.addend)
        check_complete_code(self.space, [r.source for r in self.rules], "Source")
        check_complete_code(self.space, [r.target for r in self.rules], "Target")
        self._by_source.update((rule.source, rule) for rule in self.rules)
        return self

    @classmethod
    def identity(cls, space: SeqSpace) -> "CylMap":
        return cls(space=space, rules=(Rule(source=(), target=()),))

    @property
    def table_depth(self) -> int:
        return max(len(rule.source) for rule in self.rules)

    @property
    def is_lazy(self) -> bool:
        return any(rule.is_lazy for rule in self.rules)

    @property
    def resolving_depth(self) -> Optional[int]:
        """Depth of a pure prefix-rewrite table, or None for lazy tables"""
        return None if self.is_lazy else self.table_depth

    def rule_for(self, word: Word) -> Optional[Rule]:
        """The rule whose source is a prefix of ``word``; None when ``word`` is too short"""
        index = self._by_source
        for k in range(len(word) + 1):
            rule = index.get(word[:k])
            if rule is not None:
                return rule
        return None

    def run(self, word: Word) -> Optional[Tuple[Word, Point]]:
        rule = self.rule_for(word)
        if rule is None:
            return None
        return rule.apply_to_word(self.space, word)

    def rule_for_point(self, point: Point) -> Rule:
        rule = self.rule_for(point.prefix(self.table_depth))
        assert rule is not None
        return rule

    def lazy_rules(self) -> List[Rule]:
        return [rule for rule in self.rules if rule.is_lazy]


class PiecewisePower(BaseModel):
    """A full-group element: ``x ↦ T^{n_j} x`` on the j-th cylinder piece"""

    model_config = ConfigDict(frozen=True)

    base_map: CylMap
    pieces: Tuple[Tuple[Word, int], ...]

    @model_validator(mode="after")
    def _pieces_partition(self) -> "PiecewisePower":
        check_complete_code(self.base_map.space, [w for w, _ in self.pieces], "Piece")
        return self

    def exponent_for(self, word: Word) -> Optional[int]:
        for piece, exponent in self.pieces:
            if word[: len(piece)] == piece:
                return exponent
        return None

    @property
    def exponents(self) -> List[int]:
        return sorted({e for _, e in self.pieces})


class LazyExpansion(BaseModel):
    """Pure prefix rewrites of a table up to a depth, plus the words still carrying"""

    model_config = ConfigDict(frozen=True)

    depth: int
    rules: Tuple[Tuple[Word, Word], ...]
    unresolved: Tuple[Word, ...]


class DiffClassification(BaseModel):
    """Partition of the depth-d cylinders by agreement of two maps"""

    model_config = ConfigDict(frozen=True)

    space: SeqSpace
    depth: int
    equal: Tuple[Word, ...] = ()
    different: Tuple[Word, ...] = ()
    unresolved: Tuple[Word, ...] = ()

    def as_dict(self) -> Dict[str, Tuple[Word, ...]]:
        return {"equal": self.equal, "different": self.different, "unresolved": self.unresolved}

    def class_of(self, word: Word) -> str:
        for name, words in self.as_dict().items():
            if word in words:
                return name
        raise KeyError(word)
