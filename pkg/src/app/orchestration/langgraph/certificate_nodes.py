"""LangGraph nodes for the Rokhlin certificate workflow."""

import logging
from fractions import Fraction
from typing import Any, Dict, List, Tuple

from ...application.workflows.construction_workflow import ConstructionWorkflow
from ...application.workflows.reports import CommandReport, CommandStatus
from ...domain.entities.measures import MeasureSpec
from ...domain.entities.towers import MarkerSeq
from ...domain.models.errors import RokhlinInfeasibleError
from ...domain.models.value_objects import fraction_text, parse_fraction
from .certificate_state import (
    CertificateState,
    set_error_state,
    set_success_state,
    update_certificate_state,
)

logger = logging.getLogger(__name__)


class CertificateNodes:
    """LangGraph nodes for the Rokhlin certificate workflow."""

    def __init__(self, workflow: ConstructionWorkflow):
        self.workflow = workflow
        logger.info("Certificate nodes initialized")

    def _inputs(self, state: CertificateState) -> Tuple[MarkerSeq, List[MeasureSpec], Fraction]:
        space = self.workflow.space(state["space"])
        M = self.workflow.markers(state["markers"], space, state["levels"])
        measures = self.workflow.measures(state.get("measures") or [], space)
        return M, measures, parse_fraction(state["eps"])

    def prepare_node(self, state: CertificateState) -> Dict[str, Any]:
        """Node to check the request before any construction runs."""
        try:
            logger.info(f"Preparing Rokhlin certificate for space {state.get('space')}")

            if state.get("levels", 0) < 1:
                return set_error_state("At least one marker level is required")
            if state.get("m", 0) < 1:
                return set_error_state("m must be positive")
            level = state.get("level")
            if level is not None and not 1 <= level <= state["levels"]:
                return set_error_state(f"Level {level} outside 1..{state['levels']}")

            M, measures, eps = self._inputs(state)
            if not 0 < eps < 1:
                return set_error_state("ε must lie strictly between 0 and 1")

            return update_certificate_state(
                current_step="prepared",
                execution_metadata={
                    "space": M.space.describe(),
                    "markers": M.name,
                    "measures": len(measures),
                    "seed": self.workflow.settings.seed,
                },
            )

        except Exception as e:
            logger.error(f"Failed to prepare certificate request: {e}")
            return set_error_state(f"Failed to prepare certificate request: {str(e)}")

    def validate_markers_node(self, state: CertificateState) -> Dict[str, Any]:
        """Node to check the marker clauses at every level."""
        try:
            logger.info("Validating markers")

            M, _, _ = self._inputs(state)
            reports = []
            for n in range(1, M.depth + 1):
                report = self.workflow.towers.validate_markers(M, n, depth=2 * n)
                reports.append(
                    {
                        "level": n,
                        "depth": report.depth,
                        "clauses": {name: status.value for name, status in report.clauses.items()},
                        "notes": list(report.notes),
                    }
                )
                if report.failed:
                    return {
                        "marker_reports": reports,
                        **set_error_state(f"Markers fail {', '.join(report.failed)} at level {n}"),
                    }

            return update_certificate_state(marker_reports=reports, current_step="markers_validated")

        except Exception as e:
            logger.error(f"Failed to validate markers: {e}")
            return set_error_state(f"Failed to validate markers: {str(e)}")

    def scan_levels_node(self, state: CertificateState) -> Dict[str, Any]:
        """Node to find the first marker level whose tower masses meet the bounds."""
        try:
            M, measures, eps = self._inputs(state)
            towers = self.workflow.towers

            forced = state.get("level")
            if forced is not None:
                towers.ensure_aperiodic(M.T, towers.verification_depth(M.T, *M.sets))
                scanned = [towers.level_bounds(M.T, M, forced, state["m"], eps, measures)]
                chosen = forced
            else:
                scanned = towers.scan_levels(M.T, M, state["m"], eps, measures)
                chosen = scanned[-1].level if scanned and scanned[-1].meets else None

            logger.info(f"Scanned {len(scanned)} level(s); chosen level {chosen}")
            return {
                "level_scan": [bounds.model_dump(mode="json") for bounds in scanned],
                "chosen_level": chosen,
                "current_step": "levels_scanned",
            }

        except Exception as e:
            logger.error(f"Failed to scan marker levels: {e}")
            return set_error_state(f"Failed to scan marker levels: {str(e)}")

    def build_certificate_node(self, state: CertificateState) -> Dict[str, Any]:
        """Node to build F at the chosen level and certify its coverage."""
        try:
            M, measures, eps = self._inputs(state)
            level = state["chosen_level"]
            certificate = self.workflow.towers.rokhlin_set(
                M.T, M, state["m"], eps, measures, level=level
            )
            logger.info(
                f"Certificate at level {level}: coverage "
                f"{[fraction_text(c) for c in certificate.coverage]}"
            )
            return update_certificate_state(
                certificate=self.workflow.certificate_data(certificate),
                current_step="certificate_built",
                output_data={"lines": self.workflow.certificate_lines(certificate)},
            )

        except Exception as e:
            logger.error(f"Failed to build certificate: {e}")
            return set_error_state(f"Failed to build certificate: {str(e)}")

    def infeasible_node(self, state: CertificateState) -> Dict[str, Any]:
        """Node to record the best certificate when no level meets the bounds."""
        try:
            M, measures, eps = self._inputs(state)
            try:
                certificate = self.workflow.towers.rokhlin_set(M.T, M, state["m"], eps, measures)
            except RokhlinInfeasibleError as e:
                lines = [str(e)]
                best = None
                if e.best is not None:
                    best = self.workflow.certificate_data(e.best)
                    lines.append("best level seen:")
                    lines.extend(self.workflow.certificate_lines(e.best))
                return update_certificate_state(
                    certificate=best,
                    current_step="infeasible",
                    output_data={"lines": lines, "infeasible": True},
                )
            return update_certificate_state(
                certificate=self.workflow.certificate_data(certificate),
                current_step="certificate_built",
                output_data={"lines": self.workflow.certificate_lines(certificate)},
            )

        except Exception as e:
            logger.error(f"Failed to search marker levels: {e}")
            return set_error_state(f"Failed to search marker levels: {str(e)}")

    def report_node(self, state: CertificateState) -> Dict[str, Any]:
        """Node to assemble the final report."""
        error = state.get("error")
        if error:
            report = CommandReport.error("rokhlin", error)
            return {"output_data": {"report": report.model_dump(mode="json")}, "current_step": "reported"}

        certificate = state.get("certificate") or {}
        output_data = state.get("output_data") or {}
        success = bool(certificate.get("success")) and not output_data.get("infeasible")
        lines = list(output_data.get("lines", []))
        report = CommandReport(
            verb="rokhlin",
            status=CommandStatus.OK if success else CommandStatus.FAILED,
            data=dict(certificate) if certificate else {"success": False},
            lines=lines,
        )
        output = {"report": report.model_dump(mode="json"), "lines": lines}
        if success:
            return {**set_success_state(output), "current_step": "reported"}
        return {
            "output_data": output,
            "success": False,
            "workflow_complete": True,
            "current_step": "reported",
        }


# Routing functions for conditional edges
def route_after_prepare(state: CertificateState) -> str:
    return "report" if state.get("error") else "validate_markers"


def route_after_markers(state: CertificateState) -> str:
    return "report" if state.get("error") else "scan_levels"


def route_after_scan(state: CertificateState) -> str:
    if state.get("error"):
        return "report"
    if state.get("chosen_level") is None:
        return "infeasible"
    return "build_certificate"
