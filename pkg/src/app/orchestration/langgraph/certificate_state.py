"""Rokhlin certificate LangGraph state definition."""

import operator
from typing import Annotated, Any, Dict, List, Optional

from typing_extensions import TypedDict


class CertificateState(TypedDict):
    """State for the Rokhlin certificate workflow."""

    # Input parameters
    space: str
    markers: str
    levels: int
    m: int
    eps: str
    measures: List[str]
    level: Optional[int]

    # Marker checks, one entry per level
    marker_reports: List[Dict[str, Any]]

    # Level scan
    level_scan: Annotated[List[Dict[str, Any]], operator.add]
    chosen_level: Optional[int]

    # Certificate
    certificate: Optional[Dict[str, Any]]

    # Workflow control
    current_step: str
    workflow_complete: bool

    # Output data
    output_data: Dict[str, Any]

    # Error handling
    error: Optional[str]
    success: bool

    # Execution metadata
    execution_metadata: Dict[str, Any]


def initial_certificate_state(
    space: str = "2",
    markers: str = "zeros",
    levels: int = 6,
    m: int = 3,
    eps: str = "3/10",
    measures: Optional[List[str]] = None,
    level: Optional[int] = None,
) -> CertificateState:
    """A complete starting state for the given inputs."""
    return CertificateState(
        space=space,
        markers=markers,
        levels=levels,
        m=m,
        eps=eps,
        measures=list(measures or ["uniform"]),
        level=level,
        marker_reports=[],
        level_scan=[],
        chosen_level=None,
        certificate=None,
        current_step="start",
        workflow_complete=False,
        output_data={},
        error=None,
        success=False,
        execution_metadata={},
    )


# State update helpers
def update_certificate_state(**kwargs) -> Dict[str, Any]:
    """Helper function to create state updates."""
    return {k: v for k, v in kwargs.items() if v is not None}


def set_error_state(error_message: str) -> Dict[str, Any]:
    """Helper to set error state."""
    return {"error": error_message, "success": False, "workflow_complete": True}


def set_success_state(output_data: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """Helper to set success state."""
    return {
        "success": True,
        "workflow_complete": True,
        "output_data": output_data or {},
    }
