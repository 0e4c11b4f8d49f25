"""Event publisher implementations."""

import logging
from typing import List, Optional, Type

from ...domain.interfaces.events import EventPublisher
from ...domain.models.events import DomainEvent

logger = logging.getLogger(__name__)


class LoggingEventPublisher(EventPublisher):
    """Publishes events to the log; used by the command line."""

    def __init__(self, level: int = logging.INFO):
        self.level = level

    def publish(self, event: DomainEvent) -> None:
        payload = event.model_dump(exclude={"event_id", "occurred_at", "metadata"})
        logger.log(self.level, f"{event.event_type} {event.aggregate_id}: {payload}")


class InMemoryEventPublisher(EventPublisher):
    """Keeps published events in order; used by tests and the graph pipeline."""

    def __init__(self):
        self.events: List[DomainEvent] = []

    def publish(self, event: DomainEvent) -> None:
        self.events.append(event)
        logger.debug(f"Recorded {event.event_type} for {event.aggregate_id}")

    def of_type(self, kind: Type[DomainEvent]) -> List[DomainEvent]:
        return [event for event in self.events if isinstance(event, kind)]

    def last(self, kind: Optional[Type[DomainEvent]] = None) -> Optional[DomainEvent]:
        events = self.of_type(kind) if kind else self.events
        return events[-1] if events else None

    def clear(self) -> None:
        self.events.clear()
