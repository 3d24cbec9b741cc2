from .base import Entity
from .enums import PrimitiveAction, Split, DecoderKind, Variant
from .frame import Frame
from .maze import Maze, SceneObject, Pose, GoalSpec
from .video import Video, GoalImage, LabeledTrajectory
from .manifest import DatasetManifest, SceneEntry, MANIFEST_FORMAT_VERSION
from .flow import FlowField, DominantVectors, DecoderParams
from .semantic_action import SemanticAction, N_SEMANTIC_ACTIONS, STOP_INDEX, MAX_REPEATS
from .episode import EpisodeRecord

__all__ = [
    "Entity", "PrimitiveAction", "Split", "DecoderKind", "Variant",
    "Frame", "Maze", "SceneObject", "Pose", "GoalSpec",
    "Video", "GoalImage", "LabeledTrajectory",
    "DatasetManifest", "SceneEntry", "MANIFEST_FORMAT_VERSION",
    "FlowField", "DominantVectors", "DecoderParams",
    "SemanticAction", "N_SEMANTIC_ACTIONS", "STOP_INDEX", "MAX_REPEATS",
    "EpisodeRecord",
]
