"""LangGraph orchestration implementation"""

from .certificate_nodes import CertificateNodes
from .certificate_orchestrator import CertificateOrchestrator
from .certificate_state import CertificateState, initial_certificate_state

__all__ = [
    "CertificateOrchestrator",
    "CertificateState",
    "CertificateNodes",
    "initial_certificate_state",
]
