import math
from typing import List

import numpy as np

from src.domain.entities.enums import PrimitiveAction
from src.domain.entities.maze import HEADING_STEP, GoalSpec, Maze, Pose
from src.domain.entities.video import GoalImage, Video
from src.domain.exceptions import GoalSamplingError
from src.domain.services.kinematics import clearance_ok, step
from src.domain.services.navigation_oracle import is_success, successful_objects
from src.domain.services.renderer import render

MAX_TURN_BURST = 3
GOAL_SAMPLING_ATTEMPTS = 10_000


def random_start(maze: Maze, rng: np.random.Generator) -> Pose:
    """Center of a uniformly drawn free cell with a random heading."""
    free = maze.free_cells()
    cx, cy = free[int(rng.integers(len(free)))]
    x, y = maze.cell_center(cx, cy)
    return Pose(x, y, int(rng.integers(360 // HEADING_STEP)) * HEADING_STEP)


def roam(
    maze: Maze,
    seed: int,
    steps: int = 900,
    width: int = 64,
    height: int = 64,
    success_radius: float = 1.0,
    video_id: str = None
) -> Video:
    """Collect a traversal video with the forward-until-collision roamer.

    The roamer moves forward until a collision, then turns in one random
    direction for 1-3 consecutive steps. ``steps`` counts recorded frames.
    """
    if steps < 2:
        raise ValueError(f"A video needs at least 2 frames, got steps={steps}")
    rng = np.random.default_rng([seed, 0x524F414D])
    pose = random_start(maze, rng)

    frames, actions, poses, visible = [], [], [], []
    burst_action = None
    burst_left = 0
    for t in range(steps):
        frames.append(render(maze, pose, width, height))
        poses.append(pose)
        visible.append(successful_objects(maze, pose, success_radius))
        if t == steps - 1:
            break
        if burst_left > 0:
            action = burst_action
            burst_left -= 1
        else:
            action = PrimitiveAction.MOVE_FORWARD
        pose, collided = step(maze, pose, action)
        actions.append(action)
        if collided:
            burst_action = PrimitiveAction.TURN_LEFT if rng.random() < 0.5 else PrimitiveAction.TURN_RIGHT
            burst_left = int(rng.integers(1, MAX_TURN_BURST + 1))

    return Video(
        id=video_id or f"{maze.id}_v{seed}",
        scene_id=maze.id,
        seed=seed,
        frames=frames,
        success_objects=visible,
        true_actions=actions,
        poses=poses
    )


def extract_goal_images(
    maze: Maze,
    object_id: str,
    k: int = 5,
    seed: int = 0,
    width: int = 64,
    height: int = 64,
    success_radius: float = 1.0
) -> List[GoalImage]:
    """Render ``k`` success-state views of an object from sampled poses.

    Raises:
        ValueError: unknown object or k < 1.
        GoalSamplingError: fewer than k valid poses after the attempt budget.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    ox, oy = maze.object_center(object_id)
    goal = GoalSpec(object_id, success_radius)
    rng = np.random.default_rng([seed, 0x474F414C])
    images: List[GoalImage] = []
    for _ in range(GOAL_SAMPLING_ATTEMPTS):
        radius = rng.uniform(0.0, success_radius)
        angle = rng.uniform(0.0, 2.0 * math.pi)
        x, y = ox + radius * math.cos(angle), oy + radius * math.sin(angle)
        if not clearance_ok(maze, x, y):
            continue
        bearing = math.degrees(math.atan2(oy - y, ox - x))
        heading = int(round(bearing / HEADING_STEP)) * HEADING_STEP % 360
        pose = Pose(x, y, heading)
        if not is_success(maze, pose, goal):
            continue
        images.append(GoalImage(render(maze, pose, width, height), object_id, pose, len(images)))
        if len(images) == k:
            return images
    raise GoalSamplingError(
        f"Could only sample {len(images)} of {k} goal views for {object_id} in {maze.id}"
    )
