"""Text format for rule-table automorphisms.

::

    space 2
    0 -> 1
    10 -> 01
    11 -> 00 + 001(0)     # optional tail addend
    point (1) -> (0)      # exceptional point, checked against the table

Words are digit strings (``.``-separated for alphabets above 10); ``ε``
is the empty word. Exceptional points follow from the rules; listed ones
must agree with them.
"""

import logging
from typing import List, Optional

from ...domain.entities.cylmap import CylMap, Rule
from ...domain.entities.symbolic import Point, SeqSpace
from ...domain.interfaces.codecs import TextCodec
from ...domain.models.errors import BudgetExceededError, FormatSemanticError
from ...domain.services.symbolic_service import SymbolicService
from .lines import Line, LineCursor
from .literals import format_lambda_spec, format_point, format_word, parse_lambda_spec, parse_point, parse_word

logger = logging.getLogger(__name__)


class CylMapCodec(TextCodec[CylMap]):
    """Parser and canonical serializer for rule tables"""

    suffix = ".cyl"

    def __init__(self, symbolic_service: Optional[SymbolicService] = None):
        self.symbolic = symbolic_service or SymbolicService()

    def parse(self, text: str) -> CylMap:
        cursor = LineCursor(text)
        if cursor.at_end():
            raise cursor.end_error("empty input, expected 'space <lambda-spec>'")
        first = cursor.next()
        space = self.parse_space_line(first)

        rules: List[Rule] = []
        points: List[Line] = []
        while not cursor.at_end():
            line = cursor.next()
            if line.keyword == "point":
                points.append(line)
            else:
                rules.append(self._rule(line, space))
        if not rules:
            raise first.semantic_error("table without rules")
        try:
            T = CylMap(space=space, rules=tuple(sorted(rules, key=lambda r: r.source)))
        except ValueError as e:
            raise FormatSemanticError(str(e), first.number) from None

        for line in points:
            self._check_point(line, T)
        logger.debug(f"Parsed table with {len(T.rules)} rule(s) on {space}")
        return T

    @staticmethod
    def parse_space_line(line: Line) -> SeqSpace:
        if line.keyword != "space" or len(line.tokens) != 2:
            raise line.syntax_error("expected 'space <lambda-spec>'")
        return parse_lambda_spec(line.tokens[1].text, line.number, line.column(1))

    def _rule(self, line: Line, space: SeqSpace) -> Rule:
        words = line.words()
        if len(words) not in (3, 5) or words[1] != "->" or (len(words) == 5 and words[3] != "+"):
            raise line.syntax_error("expected '<word> -> <word> [+ <point>]'")
        source = parse_word(words[0], line.number, line.column(0), space.dotted)
        target = parse_word(words[2], line.number, line.column(2), space.dotted)
        addend = Point.zero()
        if len(words) == 5:
            addend = parse_point(words[4], line.number, line.column(4), space.dotted)
        try:
            space.validate_word(source)
            space.validate_word(target)
            space.validate_point(addend)
            return Rule(source=source, target=target, addend=addend)
        except ValueError as e:
            raise line.semantic_error(str(e)) from None

    def _check_point(self, line: Line, T: CylMap) -> None:
        words = line.words()
        if len(words) != 4 or words[2] != "->":
            raise line.syntax_error("expected 'point <point> -> <point>'")
        dotted = T.space.dotted
        x = parse_point(words[1], line.number, line.column(1), dotted)
        y = parse_point(words[3], line.number, line.column(3), dotted)
        try:
            image = self.symbolic.apply_point(T, x)
        except ValueError as e:
            raise line.semantic_error(str(e), 1) from None
        if image != y:
            raise line.semantic_error(f"the table sends {x} to {image}, not {y}", 3)

    def serialize(self, value: CylMap) -> str:
        dotted = value.space.dotted
        lines = [f"space {format_lambda_spec(value.space)}"]
        for rule in sorted(value.rules, key=lambda r: r.source):
            text = f"{format_word(rule.source, dotted)} -> {format_word(rule.target, dotted)}"
            if rule.is_lazy:
                text += f" + {format_point(rule.addend, dotted)}"
            lines.append(text)
        if value.is_lazy:
            try:
                for x, y in self.symbolic.exceptional_points(value):
                    lines.append(f"point {format_point(x, dotted)} -> {format_point(y, dotted)}")
            except BudgetExceededError:
                logger.debug("Exceptional points not settled; serialized without them")
        return "\n".join(lines) + "\n"
