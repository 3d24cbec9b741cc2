from abc import ABC, abstractmethod
from typing import List, Tuple

from src.domain.entities.enums import DecoderKind
from src.domain.entities.frame import Frame
from src.domain.entities.video import LabeledTrajectory


class LabelRepository(ABC):
    """Repository interface for pseudo-action label files."""

    @abstractmethod
    def save(self, trajectory: LabeledTrajectory) -> str:
        pass

    @abstractmethod
    def get(
        self,
        video_id: str,
        decoder: DecoderKind,
        frames: List[Frame],
        success_objects: List[Tuple[str, ...]]
    ) -> LabeledTrajectory:
        """Load labels and attach them to the video's frames."""
        pass

    @abstractmethod
    def exists(self, video_id: str, decoder: DecoderKind) -> bool:
        pass
