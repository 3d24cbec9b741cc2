from abc import ABC, abstractmethod
from typing import Any, Dict, List, Sequence


class ArtifactRepository(ABC):
    """Repository interface for run artifacts: tables, reports and configs.

    Paths are relative to the dataset root unless absolute.
    """

    @abstractmethod
    def resolve(self, path: str) -> str:
        pass

    @abstractmethod
    def write_table(self, path: str, header: Sequence[str], rows: List[Sequence[Any]]) -> str:
        """Write a CSV file atomically."""
        pass

    @abstractmethod
    def append_rows(self, path: str, header: Sequence[str], rows: List[Sequence[Any]], truncate: bool = False) -> str:
        """Append rows to a CSV file, writing the header when the file is new."""
        pass

    @abstractmethod
    def read_table(self, path: str) -> List[Dict[str, str]]:
        pass

    @abstractmethod
    def write_text(self, path: str, text: str) -> str:
        pass

    @abstractmethod
    def list(self, pattern: str) -> List[str]:
        """Relative paths matching a glob pattern, sorted."""
        pass
