"""Text format for measures on a sequence space.

::

    space 2
    bernoulli
    head 1/2 1/2             # one line per coordinate before the repeating block
    period 1/3 2/3           # one line per coordinate of the repeating block

    markov
    initial 1/2 1/2
    head 1/2 1/2 | 1 0       # transition rows separated by '|'
    period 1/2 1/2 | 1/2 1/2

    atomic
    atom 1/2 (0)
    atom 1/2 (1)

    mix
    weight 1/2
    bernoulli
    ...
    weight 1/2
    atomic
    ...
    end

The ``space`` line comes first and is shared by every stanza.
"""

import logging
from fractions import Fraction
from typing import List, Tuple

from ...domain.entities.measures import Atomic, Bernoulli, Markov, MeasureSpec, Mixture
from ...domain.entities.symbolic import SeqSpace
from ...domain.interfaces.codecs import TextCodec
from ...domain.models.errors import FormatSemanticError, FormatSyntaxError
from ...domain.models.value_objects import fraction_text
from .lines import Line, LineCursor
from .literals import format_lambda_spec, format_point, parse_lambda_spec, parse_point

logger = logging.getLogger(__name__)

STANZAS = ("bernoulli", "markov", "atomic", "mix")


class MeasureCodec(TextCodec[MeasureSpec]):
    """Parser and canonical serializer for measure specs"""

    suffix = ".msr"

    def parse(self, text: str) -> MeasureSpec:
        cursor = LineCursor(text)
        if cursor.at_end():
            raise cursor.end_error("empty input, expected 'space <lambda-spec>'")
        first = cursor.next()
        if first.keyword != "space" or len(first.tokens) != 2:
            raise first.syntax_error("expected 'space <lambda-spec>'")
        space = parse_lambda_spec(first.tokens[1].text, first.number, first.column(1))
        measure = self._stanza(cursor, space)
        if not cursor.at_end():
            raise cursor.next().syntax_error("a file holds one measure; wrap several in 'mix'")
        logger.debug(f"Parsed {measure.kind} measure on {space}")
        return measure

    def _stanza(self, cursor: LineCursor, space: SeqSpace) -> MeasureSpec:
        start = cursor.next()
        if start.keyword not in STANZAS or len(start.tokens) != 1:
            raise start.syntax_error(f"expected one of {', '.join(STANZAS)}")
        try:
            if start.keyword == "bernoulli":
                return self._bernoulli(start, cursor, space)
            if start.keyword == "markov":
                return self._markov(start, cursor, space)
            if start.keyword == "atomic":
                return self._atomic(start, cursor, space)
            return self._mixture(start, cursor, space)
        except ValueError as e:
            if isinstance(e, (FormatSyntaxError, FormatSemanticError)):
                raise
            raise start.semantic_error(str(e)) from None

    def _body(self, cursor: LineCursor, keywords: Tuple[str, ...]) -> List[Line]:
        lines: List[Line] = []
        while cursor.peek() is not None and cursor.peek().keyword in keywords:
            lines.append(cursor.next())
        return lines

    def _vector(self, line: Line, start: int = 1) -> Tuple[Fraction, ...]:
        return tuple(line.fraction(i) for i in range(start, len(line.tokens)))

    def _matrix(self, line: Line) -> Tuple[Tuple[Fraction, ...], ...]:
        rows: List[Tuple[Fraction, ...]] = [()]
        for i in range(1, len(line.tokens)):
            if line.tokens[i].text == "|":
                rows.append(())
            else:
                rows[-1] = rows[-1] + (line.fraction(i),)
        if any(not row for row in rows):
            raise line.syntax_error("empty transition row")
        return tuple(rows)

    def _bernoulli(self, start: Line, cursor: LineCursor, space: SeqSpace) -> Bernoulli:
        body = self._body(cursor, ("head", "period"))
        head = [self._vector(line) for line in body if line.keyword == "head"]
        period = [self._vector(line) for line in body if line.keyword == "period"]
        self._ordered(body)
        return Bernoulli(space=space, head=tuple(head), period=tuple(period))

    def _markov(self, start: Line, cursor: LineCursor, space: SeqSpace) -> Markov:
        body = self._body(cursor, ("initial", "head", "period"))
        initial = [self._vector(line) for line in body if line.keyword == "initial"]
        if len(initial) != 1 or body[0].keyword != "initial":
            raise start.semantic_error("a markov stanza opens with exactly one 'initial' line")
        self._ordered(body[1:])
        head = [self._matrix(line) for line in body if line.keyword == "head"]
        period = [self._matrix(line) for line in body if line.keyword == "period"]
        return Markov(space=space, initial=initial[0], head=tuple(head), period=tuple(period))

    def _ordered(self, body: List[Line]) -> None:
        seen_period = False
        for line in body:
            if line.keyword == "period":
                seen_period = True
            elif seen_period:
                raise line.syntax_error("'head' lines precede 'period' lines")

    def _atomic(self, start: Line, cursor: LineCursor, space: SeqSpace) -> Atomic:
        atoms = []
        for line in self._body(cursor, ("atom",)):
            if len(line.tokens) != 3:
                raise line.syntax_error("expected 'atom <weight> <point>'")
            point = parse_point(line.tokens[2].text, line.number, line.column(2), space.dotted)
            atoms.append((point, line.fraction(1)))
        if not atoms:
            raise start.semantic_error("atomic stanza without atoms")
        return Atomic(space=space, atoms=tuple(atoms))

    def _mixture(self, start: Line, cursor: LineCursor, space: SeqSpace) -> Mixture:
        components = []
        while True:
            line = cursor.peek()
            if line is None:
                raise cursor.end_error("'mix' stanza not closed by 'end'")
            cursor.next()
            if line.keyword == "end":
                break
            if line.keyword != "weight" or len(line.tokens) != 2:
                raise line.syntax_error("expected 'weight <w>' or 'end'")
            components.append((line.fraction(1), self._stanza(cursor, space)))
        if not components:
            raise start.semantic_error("mixture without components")
        return Mixture(space=space, components=tuple(components))

    def serialize(self, value: MeasureSpec) -> str:
        return f"space {format_lambda_spec(value.space)}\n" + "\n".join(self._lines(value)) + "\n"

    def _lines(self, value: MeasureSpec) -> List[str]:
        def vector(values) -> str:
            return " ".join(fraction_text(v) for v in values)

        def matrix(rows) -> str:
            return " | ".join(vector(row) for row in rows)

        if isinstance(value, Bernoulli):
            return (
                ["bernoulli"]
                + [f"head {vector(v)}" for v in value.head]
                + [f"period {vector(v)}" for v in value.period]
            )
        if isinstance(value, Markov):
            return (
                ["markov", f"initial {vector(value.initial)}"]
                + [f"head {matrix(m)}" for m in value.head]
                + [f"period {matrix(m)}" for m in value.period]
            )
        if isinstance(value, Atomic):
            dotted = value.space.dotted
            return ["atomic"] + [
                f"atom {fraction_text(w)} {format_point(p, dotted)}" for p, w in value.atoms
            ]
        lines = ["mix"]
        for weight, component in value.components:
            lines.append(f"weight {fraction_text(weight)}")
            lines.extend(self._lines(component))
        lines.append("end")
        return lines
