"""Text format for cutting and stacking specs.

::

    stage 1 cuts 2 spacers 0 1
    stage 2 cuts 3 spacers 0 0 1
    repeat 2                        # stages 2.. recur forever

Stages are numbered 1, 2, … without gaps; ``repeat`` is optional and last.
"""

import logging
from typing import List, Optional

from ...domain.entities.rank_one import CuttingStackingSpec, Stage
from ...domain.interfaces.codecs import TextCodec
from ...domain.models.errors import FormatSemanticError
from .lines import Line, LineCursor

logger = logging.getLogger(__name__)


class CuttingStackingCodec(TextCodec[CuttingStackingSpec]):
    """Parser and canonical serializer for cutting and stacking specs"""

    suffix = ".csp"

    def parse(self, text: str) -> CuttingStackingSpec:
        cursor = LineCursor(text)
        stages: List[Stage] = []
        repeat: Optional[int] = None
        first: Optional[Line] = None
        while not cursor.at_end():
            line = cursor.next()
            first = first or line
            if repeat is not None:
                raise line.syntax_error("nothing may follow 'repeat'")
            if line.keyword == "stage":
                stages.append(self._stage(line, len(stages) + 1))
            elif line.keyword == "repeat":
                if len(line.tokens) != 2:
                    raise line.syntax_error("expected 'repeat <stage>'")
                repeat = line.integer(1)
                if not 1 <= repeat <= len(stages):
                    raise line.semantic_error(f"repeat {repeat} outside stages 1..{len(stages)}", 1)
            else:
                raise line.syntax_error(f"unknown statement '{line.keyword}'")
        if first is None:
            raise cursor.end_error("empty input, expected 'stage 1 cuts ...'")
        try:
            spec = CuttingStackingSpec(stages=tuple(stages), repeat=repeat)
        except ValueError as e:
            raise FormatSemanticError(str(e), first.number) from None
        logger.debug(f"Parsed {len(stages)} stage(s), repeat {repeat}")
        return spec

    def _stage(self, line: Line, expected: int) -> Stage:
        line.expect(2, "cuts")
        line.expect(4, "spacers")
        n = line.integer(1)
        if n != expected:
            raise line.semantic_error(f"expected stage {expected}, got stage {n}", 1)
        cuts = line.integer(3, minimum=1)
        spacers = tuple(line.integers(5, minimum=0))
        if len(spacers) != cuts:
            raise line.semantic_error(f"{cuts} cut(s) need {cuts} spacer count(s), got {len(spacers)}", 5)
        return Stage(cuts=cuts, spacers=spacers)

    def serialize(self, value: CuttingStackingSpec) -> str:
        return value.text() + "\n"
