from abc import ABC, abstractmethod

from src.domain.entities.video import Video


class VideoRepository(ABC):
    """Repository interface for traversal videos."""

    @abstractmethod
    def save(self, video: Video) -> str:
        """Persist frames and sidecar metadata; returns the video directory."""
        pass

    @abstractmethod
    def get(self, video_id: str, include_oracle: bool = False) -> Video:
        """Load a video.

        The oracle namespace (true actions, poses) is read only when
        ``include_oracle`` is set; training callers never set it.
        """
        pass

    @abstractmethod
    def exists(self, video_id: str) -> bool:
        pass
