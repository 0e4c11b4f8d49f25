"""Infrastructure services - Event publisher implementations"""

from .event_publishers import InMemoryEventPublisher, LoggingEventPublisher

__all__ = ["LoggingEventPublisher", "InMemoryEventPublisher"]
