"""File-system implementation of the artifact repository."""

import logging
from pathlib import Path
from typing import Optional, TypeVar

from ...domain.entities.bratteli import Diagram
from ...domain.entities.cylmap import CylMap
from ...domain.entities.measures import MeasureSpec
from ...domain.entities.rank_one import CuttingStackingSpec
from ...domain.interfaces.codecs import TextCodec
from ...domain.interfaces.repositories import ArtifactRepository, PathLike
from ...domain.models.errors import FormatError, FormatSyntaxError
from ..codecs import CuttingStackingCodec, CylMapCodec, DiagramCodec, MeasureCodec

logger = logging.getLogger(__name__)

T = TypeVar("T")


class FileArtifactRepository(ArtifactRepository):
    """Artifacts as UTF-8 text files, relative paths resolved against ``root``."""

    def __init__(self, root: Optional[PathLike] = None):
        self.root = Path(root) if root is not None else Path.cwd()
        self.diagrams = DiagramCodec()
        self.cylmaps = CylMapCodec()
        self.measures = MeasureCodec()
        self.specs = CuttingStackingCodec()
        logger.debug(f"File artifact repository initialized at {self.root}")

    def codec_for(self, path: PathLike) -> TextCodec:
        suffix = Path(path).suffix
        for codec in (self.diagrams, self.cylmaps, self.measures, self.specs):
            if codec.suffix == suffix:
                return codec
        error = FormatSyntaxError(f"unknown artifact suffix '{suffix}'", 1)
        error.source = str(path)
        raise error

    def _resolve(self, path: PathLike) -> Path:
        path = Path(path)
        return path if path.is_absolute() else self.root / path

    def read_text(self, path: PathLike) -> str:
        return self._resolve(path).read_text(encoding="utf-8")

    def _load(self, codec: TextCodec[T], path: PathLike) -> T:
        text = self.read_text(path)
        try:
            value = codec.parse(text)
        except FormatError as e:
            e.source = str(path)
            logger.debug(f"Rejected {path}: {e.diagnostic()}")
            raise
        logger.info(f"Loaded {path}")
        return value

    def write_text(self, path: PathLike, text: str) -> Path:
        target = self._resolve(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        with open(target, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        logger.info(f"Stored {target}")
        return target

    def _save(self, codec: TextCodec[T], path: PathLike, value: T) -> Path:
        return self.write_text(path, codec.serialize(value))

    def load_diagram(self, path: PathLike) -> Diagram:
        return self._load(self.diagrams, path)

    def save_diagram(self, path: PathLike, diagram: Diagram) -> Path:
        return self._save(self.diagrams, path, diagram)

    def load_cylmap(self, path: PathLike) -> CylMap:
        return self._load(self.cylmaps, path)

    def save_cylmap(self, path: PathLike, T: CylMap) -> Path:
        return self._save(self.cylmaps, path, T)

    def load_measure(self, path: PathLike) -> MeasureSpec:
        return self._load(self.measures, path)

    def load_spec(self, path: PathLike) -> CuttingStackingSpec:
        return self._load(self.specs, path)

    def canonical_text(self, path: PathLike) -> str:
        codec = self.codec_for(path)
        return codec.serialize(self._load(codec, path))
