from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from src.domain.entities.base import Entity
from src.domain.entities.enums import DecoderKind, PrimitiveAction
from src.domain.entities.frame import Frame
from src.domain.entities.maze import Pose


class Video(Entity):
    """Egocentric traversal clip of one scene.

    ``true_actions`` and ``poses`` form the oracle namespace: they are kept
    for scoring the pseudo-action decoder and are ``None`` when a video is
    loaded for training. ``success_objects[t]`` lists the scene objects whose
    success predicate holds at frame t (ground-truth detector stand-in).
    """

    def __init__(
        self,
        id: str,
        scene_id: str,
        seed: int,
        frames: List[Frame],
        success_objects: List[Tuple[str, ...]],
        true_actions: Optional[List[PrimitiveAction]] = None,
        poses: Optional[List[Pose]] = None
    ):
        super().__init__(id)
        if len(success_objects) != len(frames):
            raise ValueError("success_objects must have one entry per frame")
        if true_actions is not None:
            if len(true_actions) != len(frames) - 1:
                raise ValueError(
                    f"Video {id}: expected {len(frames) - 1} actions, got {len(true_actions)}"
                )
            if PrimitiveAction.STOP in true_actions:
                raise ValueError(f"Video {id}: roamer videos never contain STOP")
        if poses is not None and len(poses) != len(frames):
            raise ValueError("poses must have one entry per frame")
        self.scene_id = scene_id
        self.seed = seed
        self.frames = list(frames)
        self.success_objects = [tuple(objs) for objs in success_objects]
        self.true_actions = list(true_actions) if true_actions is not None else None
        self.poses = list(poses) if poses is not None else None

    def __len__(self):
        return len(self.frames)

    @property
    def has_oracle(self) -> bool:
        return self.true_actions is not None

    def without_oracle(self) -> "Video":
        return Video(self.id, self.scene_id, self.seed, self.frames, self.success_objects)


@dataclass(frozen=True)
class GoalImage:
    """A success-state view of a goal object."""
    frame: Frame
    object_id: str
    capture_pose: Pose
    view_index: int = 0


@dataclass
class LabeledTrajectory:
    """Frames paired with decoded pseudo-actions, T = {f_t, a_t}."""
    video_id: str
    frames: List[Frame]
    pseudo_actions: List[PrimitiveAction]
    decoder: DecoderKind = DecoderKind.FLOW
    tau_x: float = 0.0
    tau_y: float = 0.0
    success_objects: List[Tuple[str, ...]] = field(default_factory=list)

    def __post_init__(self):
        if len(self.frames) >= 1 and len(self.pseudo_actions) != len(self.frames) - 1:
            raise ValueError(
                f"Trajectory {self.video_id}: expected {len(self.frames) - 1} actions, "
                f"got {len(self.pseudo_actions)}"
            )
        if any(a is PrimitiveAction.STOP for a in self.pseudo_actions):
            raise ValueError("Pseudo-actions never contain STOP")

    def __len__(self):
        return len(self.frames)

    @classmethod
    def empty(cls) -> "LabeledTrajectory":
        """Context-free trajectory for the no-context variant."""
        return cls(video_id="empty", frames=[], pseudo_actions=[])

    @property
    def is_empty(self) -> bool:
        return not self.frames
