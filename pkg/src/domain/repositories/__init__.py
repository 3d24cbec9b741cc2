from .scene_repository import SceneRepository
from .video_repository import VideoRepository
from .goal_repository import GoalRepository
from .label_repository import LabelRepository
from .manifest_repository import ManifestRepository
from .checkpoint_repository import CheckpointRepository
from .artifact_repository import ArtifactRepository

__all__ = [
    "SceneRepository",
    "VideoRepository",
    "GoalRepository",
    "LabelRepository",
    "ManifestRepository",
    "CheckpointRepository",
    "ArtifactRepository"
]
