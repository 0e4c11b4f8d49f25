"""Line tokenizer shared by the text codecs.

Every format is UTF-8, one statement per line, ``#`` starts a comment and
blank lines are ignored. Tokens keep their 1-based column so diagnostics can
point at the offending word.
"""

from typing import Iterator, List, NamedTuple, Optional

from ...domain.models.errors import FormatSemanticError, FormatSyntaxError
from ...domain.models.value_objects import parse_fraction


class Token(NamedTuple):
    text: str
    column: int


class Line(NamedTuple):
    number: int
    tokens: List[Token]

    @property
    def keyword(self) -> str:
        return self.tokens[0].text

    def words(self, start: int = 0) -> List[str]:
        return [token.text for token in self.tokens[start:]]

    def column(self, index: int) -> int:
        if index < len(self.tokens):
            return self.tokens[index].column
        last = self.tokens[-1]
        return last.column + len(last.text)

    def syntax_error(self, message: str, index: int = 0) -> FormatSyntaxError:
        return FormatSyntaxError(message, self.number, self.column(index))

    def semantic_error(self, message: str, index: int = 0) -> FormatSemanticError:
        return FormatSemanticError(message, self.number, self.column(index))

    def expect(self, index: int, keyword: str) -> None:
        if index >= len(self.tokens) or self.tokens[index].text != keyword:
            raise self.syntax_error(f"expected '{keyword}'", index)

    def integer(self, index: int, minimum: Optional[int] = None) -> int:
        if index >= len(self.tokens):
            raise self.syntax_error("expected an integer", index)
        text = self.tokens[index].text
        try:
            value = int(text)
        except ValueError:
            raise self.syntax_error(f"expected an integer, got '{text}'", index) from None
        if minimum is not None and value < minimum:
            raise self.semantic_error(f"{value} is below {minimum}", index)
        return value

    def integers(self, start: int, stop: Optional[int] = None, minimum: Optional[int] = None) -> List[int]:
        stop = len(self.tokens) if stop is None else stop
        return [self.integer(i, minimum) for i in range(start, stop)]

    def fraction(self, index: int):
        if index >= len(self.tokens):
            raise self.syntax_error("expected a rational number", index)
        try:
            return parse_fraction(self.tokens[index].text)
        except ValueError:
            raise self.syntax_error(
                f"expected a rational number, got '{self.tokens[index].text}'", index
            ) from None


def tokenize(text: str) -> Iterator[Line]:
    """Yield the non-empty lines of ``text`` with their tokens"""
    for number, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0]
        tokens: List[Token] = []
        column = 0
        while column < len(content):
            if content[column].isspace():
                column += 1
                continue
            start = column
            while column < len(content) and not content[column].isspace():
                column += 1
            tokens.append(Token(content[start:column], start + 1))
        if tokens:
            yield Line(number, tokens)


class LineCursor:
    """Look-ahead over tokenized lines for the stanza formats"""

    def __init__(self, text: str):
        self._lines = list(tokenize(text))
        self._index = 0
        self._last_number = text.count("\n") + 1

    def peek(self) -> Optional[Line]:
        if self._index < len(self._lines):
            return self._lines[self._index]
        return None

    def next(self) -> Line:
        line = self.peek()
        if line is None:
            raise FormatSyntaxError("unexpected end of input", self._last_number)
        self._index += 1
        return line

    def at_end(self) -> bool:
        return self.peek() is None

    def end_error(self, message: str) -> FormatSyntaxError:
        return FormatSyntaxError(message, self._last_number)
