"""Text codec interfaces for the line-oriented artifact formats"""

from abc import ABC, abstractmethod
from typing import Generic, TypeVar

T = TypeVar("T")


class TextCodec(ABC, Generic[T]):
    """Parse and serialize one artifact kind"""

    #: File suffix the repository associates with this codec
    suffix: str = ""

    @abstractmethod
    def parse(self, text: str) -> T:
        """Parse text; raises FormatSyntaxError / FormatSemanticError"""
        pass

    @abstractmethod
    def serialize(self, value: T) -> str:
        """Canonical text form; parse(serialize(x)) == x"""
        pass
