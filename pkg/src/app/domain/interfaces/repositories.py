"""Domain repository interfaces."""

from abc import ABC, abstractmethod
from pathlib import Path
from typing import Union

from ..entities.bratteli import Diagram
from ..entities.cylmap import CylMap
from ..entities.measures import MeasureSpec
from ..entities.rank_one import CuttingStackingSpec

PathLike = Union[str, Path]


class ArtifactRepository(ABC):
    """Load and store the text artifacts the constructions consume and produce."""

    @abstractmethod
    def load_diagram(self, path: PathLike) -> Diagram:
        """Load a ``BBD1`` diagram."""
        pass

    @abstractmethod
    def save_diagram(self, path: PathLike, diagram: Diagram) -> Path:
        """Store a diagram in canonical form."""
        pass

    @abstractmethod
    def load_cylmap(self, path: PathLike) -> CylMap:
        """Load a rule table."""
        pass

    @abstractmethod
    def save_cylmap(self, path: PathLike, T: CylMap) -> Path:
        """Store a rule table in canonical form."""
        pass

    @abstractmethod
    def load_measure(self, path: PathLike) -> MeasureSpec:
        """Load a measure spec."""
        pass

    @abstractmethod
    def load_spec(self, path: PathLike) -> CuttingStackingSpec:
        """Load a cutting and stacking spec."""
        pass

    @abstractmethod
    def read_text(self, path: PathLike) -> str:
        """Raw text of an artifact."""
        pass

    @abstractmethod
    def write_text(self, path: PathLike, text: str) -> Path:
        """Store raw text with LF line endings."""
        pass

    @abstractmethod
    def canonical_text(self, path: PathLike) -> str:
        """The canonical serialization of the artifact stored at ``path``."""
        pass
