from abc import ABC, abstractmethod
from typing import List

from src.domain.entities.video import GoalImage


class GoalRepository(ABC):
    """Repository interface for goal-image sets, keyed by (scene, object)."""

    @abstractmethod
    def save(self, scene_id: str, object_id: str, images: List[GoalImage]) -> str:
        pass

    @abstractmethod
    def get(self, scene_id: str, object_id: str) -> List[GoalImage]:
        pass

    @abstractmethod
    def exists(self, scene_id: str, object_id: str) -> bool:
        pass
