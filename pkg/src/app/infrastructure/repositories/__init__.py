"""Infrastructure repositories - File-backed artifact storage"""

from .file_artifact_repository import FileArtifactRepository

__all__ = ["FileArtifactRepository"]
