"""Inline literals: lambda-specs, points, adic integers, words, sets and path labels.

Grammar::

    lambda-spec  N | Nadic | HEAD(PERIOD)         sizes separated by '.'
    point        HEAD(PERIOD) | HEAD               one char per digit, or '.'-separated
    adic         POINT@LAMBDA-SPEC                 e.g. 110(0)@2 is the 2-adic 3
    word         [DIGITS] | DIGITS | ε
    set          WORD ... {POINT} ...              a union of cylinders and points
    path         L,L,...[@V.V....]                 order labels with optional vertices
"""

import re
from typing import List, Optional, Sequence, Tuple

from ...domain.entities.adic import AdicInt
from ...domain.entities.symbolic import CylinderUnion, Point, SeqSpace
from ...domain.models.errors import BorelDeskError, FormatSemanticError, FormatSyntaxError
from ...domain.models.value_objects import Word

EMPTY_WORD = "ε"

_STREAM = re.compile(r"^([0-9.]*)\(([0-9.]+)\)$")
_SET_PART = re.compile(r"\[[^\]]*\]|\{[^}]*\}|[^\s∪|,]+")


def _digits(text: str, column: int, line: int, dotted: bool = False) -> Tuple[int, ...]:
    """``1101``, or ``1.10.2`` when digits may exceed 9"""
    if not text:
        return ()
    parts = text.split(".") if dotted or "." in text else list(text)
    try:
        return tuple(int(part) for part in parts)
    except ValueError:
        raise FormatSyntaxError(f"malformed digits '{text}'", line, column) from None


def parse_lambda_spec(text: str, line: int = 1, column: int = 1) -> SeqSpace:
    """``2``, ``2adic``, ``(2.3)`` or ``3.2(2)``"""
    text = text.strip()
    if text.endswith("adic"):
        text = text[: -len("adic")]
    try:
        if text.isdigit():
            return SeqSpace.constant(int(text))
        match = _STREAM.match(text)
        if match is None:
            raise FormatSyntaxError(f"malformed lambda-spec '{text}'", line, column)
        head = [int(s) for s in match.group(1).split(".") if s]
        period = [int(s) for s in match.group(2).split(".") if s]
        return SeqSpace(head=tuple(head), period=tuple(period))
    except ValueError as e:
        if isinstance(e, BorelDeskError):
            raise
        raise FormatSemanticError(str(e), line, column) from None


def format_lambda_spec(space: SeqSpace) -> str:
    return space.describe()


def parse_point(text: str, line: int = 1, column: int = 1, dotted: bool = False) -> Point:
    """``110(0)``; a bare digit word is followed by zeros"""
    text = text.strip()
    match = _STREAM.match(text)
    if match is None:
        if not re.fullmatch(r"[0-9.]+", text):
            raise FormatSyntaxError(f"malformed point '{text}'", line, column)
        return Point.from_word(_digits(text, column, line, dotted))
    head = _digits(match.group(1).strip("."), column, line, dotted)
    period = _digits(match.group(2), column, line, dotted)
    return Point(head=head, period=period)


def format_point(point: Point, dotted: bool = False) -> str:
    return point.text(dotted=dotted or any(d > 9 for d in point.head + point.period))


def parse_adic(text: str, line: int = 1, column: int = 1) -> AdicInt:
    if "@" not in text:
        raise FormatSyntaxError(f"adic integer '{text}' lacks '@lambda-spec'", line, column)
    digits, spec = text.rsplit("@", 1)
    space = parse_lambda_spec(spec, line, column + len(digits) + 1)
    point = parse_point(digits, line, column, space.dotted)
    try:
        return AdicInt(space=space, value=point)
    except ValueError as e:
        raise FormatSemanticError(str(e), line, column) from None


def format_adic(x: AdicInt) -> str:
    return str(x)


def parse_word(text: str, line: int = 1, column: int = 1, dotted: bool = False) -> Word:
    text = text.strip()
    if text.startswith("[") and text.endswith("]"):
        text = text[1:-1]
    if text == EMPTY_WORD:
        return ()
    if text and not re.fullmatch(r"[0-9.]+", text):
        raise FormatSyntaxError(f"malformed word '{text}'", line, column)
    return _digits(text, column, line, dotted)


def format_word(word: Sequence[int], dotted: bool = False) -> str:
    if not word:
        return EMPTY_WORD
    if dotted or any(d > 9 for d in word):
        return ".".join(str(d) for d in word)
    return "".join(str(d) for d in word)


def parse_set(space: SeqSpace, text: str, line: int = 1) -> CylinderUnion:
    """``[0] [11] {1(0)}``; separators may be spaces, commas, '|' or '∪'"""
    words: List[Word] = []
    points: List[Point] = []
    for match in _SET_PART.finditer(text):
        part, column = match.group(0), match.start() + 1
        if part.startswith("{"):
            points.append(parse_point(part[1:-1], line, column, space.dotted))
        elif part == "∅":
            continue
        else:
            words.append(parse_word(part, line, column, space.dotted))
    try:
        union = CylinderUnion(space=space, words=tuple(words), points=tuple(points))
        union.ensure_disjoint()
    except ValueError as e:
        if isinstance(e, (FormatSyntaxError, FormatSemanticError)):
            raise
        raise FormatSemanticError(str(e), line) from None
    return union


def format_set(A: CylinderUnion) -> str:
    dotted = A.space.dotted
    parts = [f"[{format_word(w, dotted) if w else ''}]" for w in A.words]
    parts += [f"{{{format_point(p, dotted)}}}" for p in A.points]
    return " ".join(parts)


def parse_path_labels(
    text: str, line: int = 1, column: int = 1
) -> Tuple[Tuple[int, ...], Optional[Tuple[int, ...]]]:
    """``1,1,0`` or ``1,1,0@0.0.1`` into labels and terminal vertices"""
    labels_text, _, vertex_text = text.strip().partition("@")
    try:
        labels = tuple(int(s) for s in labels_text.split(",")) if labels_text else ()
        vertices = tuple(int(s) for s in vertex_text.split(".")) if vertex_text else None
    except ValueError:
        raise FormatSyntaxError(f"malformed path '{text}'", line, column) from None
    if vertices is not None and len(vertices) != len(labels):
        raise FormatSemanticError("path lists a different number of labels and vertices", line, column)
    return labels, vertices
