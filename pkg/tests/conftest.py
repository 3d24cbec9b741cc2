import numpy as np
import pytest

from src.domain.entities.enums import PrimitiveAction
from src.domain.entities.frame import Frame
from src.domain.entities.maze import Maze, Pose, SceneObject
from src.domain.entities.video import GoalImage, LabeledTrajectory
from src.domain.services.maze_generator import generate_maze
from src.infrastructure.config.experiment import ModelConfig, TrainConfig


def corridor_cells(length: int) -> np.ndarray:
    """A one-cell-wide horizontal corridor of ``length`` free cells at row 1."""
    cells = np.ones((3, length + 2), dtype=bool)
    cells[1, 1:length + 1] = False
    return cells


@pytest.fixture
def corridor_maze():
    """Five free cells in a row with the goal object at the east end."""
    return Maze(
        id="corridor",
        cells=corridor_cells(5),
        objects=[SceneObject("goal", cx=5, cy=1, appearance_seed=7)],
        wall_texture_seed=3
    )


@pytest.fixture
def tiny_maze():
    """Generated 9x9 maze with four objects."""
    return generate_maze(0, 9, 9, 4)


@pytest.fixture
def textured_frame():
    """64x64 uniform noise frame."""
    rng = np.random.default_rng(11)
    return Frame.from_intensities(rng.random((64, 64)))


@pytest.fixture
def tiny_model_config():
    """Smallest model that still exercises every block."""
    return ModelConfig(
        frame_height=16,
        frame_width=16,
        visual_dim=8,
        action_dim=4,
        hidden_dim=8,
        n_sa_layers=1,
        n_ca_layers=1,
        n_heads=2,
        context_stride=4,
        max_context_tokens=64,
        seed=0
    )


@pytest.fixture
def tiny_train_config():
    return TrainConfig(batch_size=4, total_steps=4, target_sync_interval=2, temporal_pairs=4, lr=1e-3, seed=0)


def noise_frames(n: int, side: int = 16, seed: int = 0):
    rng = np.random.default_rng(seed)
    return [Frame.from_intensities(rng.random((side, side))) for _ in range(n)]


@pytest.fixture
def tiny_trajectory():
    """17-frame labeled trajectory of noise frames; obj0 is a success from frame 12 on."""
    frames = noise_frames(17)
    actions = [PrimitiveAction.MOVE_FORWARD] * 8 + [PrimitiveAction.TURN_LEFT] * 2 + [PrimitiveAction.MOVE_FORWARD] * 6
    success = [("obj0",) if t >= 12 else () for t in range(17)]
    return LabeledTrajectory("tiny_v0", frames, actions, success_objects=success)


@pytest.fixture
def tiny_goals(tiny_trajectory):
    return [GoalImage(tiny_trajectory.frames[14], "obj0", Pose(0.75, 0.75, 0), 0)]
