"""Application workflows"""

from .construction_workflow import ConstructionWorkflow
from .reports import CommandReport, CommandStatus, OutputFormat

__all__ = ["ConstructionWorkflow", "CommandReport", "CommandStatus", "OutputFormat"]
