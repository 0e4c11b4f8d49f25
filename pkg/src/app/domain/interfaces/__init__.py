"""Domain interfaces - Abstract interfaces for external dependencies"""

from .codecs import TextCodec
from .events import EventPublisher
from .repositories import ArtifactRepository, PathLike

__all__ = [
    "ArtifactRepository",
    "PathLike",
    "TextCodec",
    "EventPublisher",
]
