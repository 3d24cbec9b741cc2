from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from src.domain.entities.frame import Frame
from src.domain.entities.video import GoalImage, LabeledTrajectory


@dataclass
class SceneTrainingData:
    """One training scene: its labeled video and goal set."""
    scene_id: str
    trajectory: LabeledTrajectory
    goals: List[GoalImage]


@dataclass
class TrainingBatch:
    """Samples drawn from a single scene; they share its context."""
    scene_id: str
    trajectory: LabeledTrajectory
    timesteps: np.ndarray
    obs: List[Frame]
    next_obs: List[Frame]
    goals: List[Frame]
    goal_objects: List[str]
    semantic_targets: np.ndarray
    rewards: np.ndarray
    terminal: np.ndarray
    pair_earlier: np.ndarray
    pair_later: np.ndarray

    @property
    def size(self) -> int:
        return len(self.obs)


@dataclass
class LossRecord:
    step: int
    l_a: float
    l_d: float
    l_q: float
    l_t: float
    total: float
    wall_ms: float


@dataclass
class TrainingResultDTO:
    """Outcome of a training run."""
    checkpoint_path: str
    loss_log_path: str
    steps: int
    final_losses: Optional[LossRecord] = None
    history: List[LossRecord] = field(default_factory=list)
