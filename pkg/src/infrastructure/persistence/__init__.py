from .file_scene_repository import FileSceneRepository
from .file_video_repository import FileVideoRepository
from .file_goal_repository import FileGoalRepository
from .file_label_repository import FileLabelRepository
from .file_manifest_repository import FileManifestRepository
from .binary_checkpoint_repository import BinaryCheckpointRepository
from .file_artifact_repository import FileArtifactRepository

__all__ = [
    "FileSceneRepository",
    "FileVideoRepository",
    "FileGoalRepository",
    "FileLabelRepository",
    "FileManifestRepository",
    "BinaryCheckpointRepository",
    "FileArtifactRepository"
]
