"""Text codecs for the artifact formats"""

from .bbd import DiagramCodec
from .cutting_stacking import CuttingStackingCodec
from .cylmap import CylMapCodec
from .measure import MeasureCodec

__all__ = ["DiagramCodec", "CylMapCodec", "MeasureCodec", "CuttingStackingCodec"]
