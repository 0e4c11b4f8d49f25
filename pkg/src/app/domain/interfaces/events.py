"""Event handling interfaces"""

from abc import ABC, abstractmethod
from typing import List

from ..models.events import DomainEvent


class EventPublisher(ABC):
    """Event publisher interface"""

    @abstractmethod
    def publish(self, event: DomainEvent) -> None:
        """Publish single event"""
        pass

    def publish_many(self, events: List[DomainEvent]) -> None:
        """Publish multiple events"""
        for event in events:
            self.publish(event)
