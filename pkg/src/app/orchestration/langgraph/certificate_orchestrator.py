"""Rokhlin certificate LangGraph orchestrator that builds and runs the certificate graph."""

import logging
from typing import Any, Dict, List, Optional

from langgraph.checkpoint.memory import MemorySaver
from langgraph.graph import END, START, StateGraph

from ...application.workflows.construction_workflow import ConstructionWorkflow
from .certificate_nodes import (
    CertificateNodes,
    route_after_markers,
    route_after_prepare,
    route_after_scan,
)
from .certificate_state import CertificateState, initial_certificate_state

logger = logging.getLogger(__name__)


class CertificateOrchestrator:
    """LangGraph orchestrator for the Rokhlin certificate workflow."""

    def __init__(self, workflow: ConstructionWorkflow):
        self.workflow = workflow
        self.nodes = CertificateNodes(workflow)
        self._graph = None
        logger.info("Certificate orchestrator initialized")

    def build_graph(self):
        """Build the LangGraph workflow."""
        try:
            workflow = StateGraph(CertificateState)

            workflow.add_node("prepare", self.nodes.prepare_node)
            workflow.add_node("validate_markers", self.nodes.validate_markers_node)
            workflow.add_node("scan_levels", self.nodes.scan_levels_node)
            workflow.add_node("build_certificate", self.nodes.build_certificate_node)
            workflow.add_node("infeasible", self.nodes.infeasible_node)
            workflow.add_node("report", self.nodes.report_node)

            workflow.add_edge(START, "prepare")
            workflow.add_conditional_edges(
                "prepare",
                route_after_prepare,
                {"report": "report", "validate_markers": "validate_markers"},
            )
            workflow.add_conditional_edges(
                "validate_markers",
                route_after_markers,
                {"report": "report", "scan_levels": "scan_levels"},
            )
            workflow.add_conditional_edges(
                "scan_levels",
                route_after_scan,
                {
                    "report": "report",
                    "infeasible": "infeasible",
                    "build_certificate": "build_certificate",
                },
            )
            workflow.add_edge("build_certificate", "report")
            workflow.add_edge("infeasible", "report")
            workflow.add_edge("report", END)

            # Checkpointer keeps each thread's state inspectable after the run
            self._graph = workflow.compile(checkpointer=MemorySaver())

            logger.info("Certificate workflow graph built successfully")
            return self._graph

        except Exception as e:
            logger.error(f"Failed to build certificate workflow graph: {e}")
            raise

    def get_graph(self):
        """Get the compiled graph, building if necessary."""
        if self._graph is None:
            self._graph = self.build_graph()
        return self._graph

    def run_certificate(
        self,
        space: str = "2",
        markers: str = "zeros",
        levels: int = 6,
        m: int = 3,
        eps: str = "3/10",
        measures: Optional[List[str]] = None,
        level: Optional[int] = None,
        thread_config: Optional[Dict[str, Any]] = None,
    ) -> Dict[str, Any]:
        """Run the certificate workflow and return the final state."""
        try:
            graph = self.get_graph()
            initial_state = initial_certificate_state(
                space=space,
                markers=markers,
                levels=levels,
                m=m,
                eps=eps,
                measures=measures,
                level=level,
            )

            if thread_config is None:
                thread_config = {
                    "configurable": {"thread_id": f"rokhlin_{space}_{markers}_{m}_{eps}"}
                }

            result = None
            for event in graph.stream(initial_state, thread_config, stream_mode="values"):
                result = event
                logger.debug(f"Workflow step completed: {event.get('current_step')}")

            return result or {"error": "No result from workflow", "success": False}

        except Exception as e:
            logger.error(f"Failed to run certificate workflow: {e}")
            return {"error": str(e), "success": False, "workflow_complete": True}
