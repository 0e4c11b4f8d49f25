"""Domain events - Events that occur in the domain"""

from datetime import datetime, timezone
from typing import Any, Dict, List
from uuid import uuid4

from pydantic import BaseModel, ConfigDict, Field


class DomainEvent(BaseModel):
    """Base class for domain events"""

    model_config = ConfigDict(frozen=True)

    event_id: str = Field(default_factory=lambda: str(uuid4()))
    event_type: str
    occurred_at: datetime = Field(default_factory=lambda: datetime.now(timezone.utc))
    aggregate_id: str
    metadata: Dict[str, Any] = Field(default_factory=dict)


class ValidationCompleted(DomainEvent):
    """Event fired when a structural validation finishes"""

    event_type: str = "ValidationCompleted"
    defect_count: int
    clauses: List[str] = Field(default_factory=list)


class CertificateIssued(DomainEvent):
    """Event fired when a construction certificate is produced"""

    event_type: str = "CertificateIssued"
    certificate_kind: str
    success: bool
    summary: Dict[str, str] = Field(default_factory=dict)


class ConstructionCompleted(DomainEvent):
    """Event fired when a diagram or tower construction finishes"""

    event_type: str = "ConstructionCompleted"
    construction: str
    levels: int = 0
