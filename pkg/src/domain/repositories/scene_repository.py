from abc import ABC, abstractmethod
from typing import List

from src.domain.entities.maze import Maze


class SceneRepository(ABC):
    """Repository interface for Maze scenes."""

    @abstractmethod
    def save(self, maze: Maze) -> str:
        """Persist a scene and return its location."""
        pass

    @abstractmethod
    def get(self, scene_id: str) -> Maze:
        """Load a scene by id."""
        pass

    @abstractmethod
    def exists(self, scene_id: str) -> bool:
        pass

    @abstractmethod
    def list_ids(self) -> List[str]:
        pass
