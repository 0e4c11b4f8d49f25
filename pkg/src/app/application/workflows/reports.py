"""Command reports shared by the workflow facade and the command line."""

import json
from enum import Enum
from typing import Any, Dict, List, Literal

from pydantic import BaseModel, ConfigDict, Field, computed_field

OutputFormat = Literal["text", "structured"]


class CommandStatus(str, Enum):
    """Outcome class of one command"""

    OK = "ok"
    DEFECTS = "defects"
    FAILED = "failed"
    ERROR = "error"


_EXIT_CODES = {
    CommandStatus.OK: 0,
    CommandStatus.DEFECTS: 1,
    CommandStatus.FAILED: 1,
    CommandStatus.ERROR: 2,
}


class CommandReport(BaseModel):
    """One self-describing report per invocation"""

    model_config = ConfigDict(frozen=True)

    verb: str
    status: CommandStatus = CommandStatus.OK
    data: Dict[str, Any] = Field(default_factory=dict)
    lines: List[str] = Field(default_factory=list, description="Human-readable rendering")

    @computed_field
    @property
    def exit_code(self) -> int:
        return _EXIT_CODES[self.status]

    def render(self, output: OutputFormat = "text") -> str:
        if output == "structured":
            return json.dumps(self.model_dump(mode="json"), indent=2, sort_keys=True)
        return "\n".join(self.lines)

    @classmethod
    def error(cls, verb: str, message: str) -> "CommandReport":
        return cls(verb=verb, status=CommandStatus.ERROR, data={"error": message}, lines=[message])
