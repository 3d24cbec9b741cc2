from typing import Tuple

import numpy as np

from src.domain.entities.enums import PrimitiveAction
from src.domain.entities.maze import HEADING_STEP, Maze, Pose

FORWARD_STEP = 0.25
COLLISION_MARGIN = 0.1

# Exact unit vectors on the axes keep repeated moves bit-stable.
_HEADING_VECTORS = {}
for _deg in range(0, 360, HEADING_STEP):
    _rad = np.deg2rad(_deg)
    _HEADING_VECTORS[_deg] = (float(np.cos(_rad)), float(np.sin(_rad)))
_HEADING_VECTORS.update({0: (1.0, 0.0), 90: (0.0, 1.0), 180: (-1.0, 0.0), 270: (0.0, -1.0)})


def heading_vector(heading: int) -> Tuple[float, float]:
    """Unit direction of a heading (counterclockwise from +x)."""
    return _HEADING_VECTORS[heading % 360]


def clearance_ok(maze: Maze, x: float, y: float, margin: float = COLLISION_MARGIN) -> bool:
    """True when (x, y) is in free space and at least ``margin`` from any wall cell."""
    cx, cy = maze.cell_of(x, y)
    if maze.is_wall(cx, cy):
        return False
    size = maze.cell_size
    for ny in (cy - 1, cy, cy + 1):
        for nx in (cx - 1, cx, cx + 1):
            if (nx, ny) == (cx, cy) or not maze.is_wall(nx, ny):
                continue
            # distance from the point to the wall cell's square
            dx = max(nx * size - x, 0.0, x - (nx + 1) * size)
            dy = max(ny * size - y, 0.0, y - (ny + 1) * size)
            if dx * dx + dy * dy <= margin * margin:
                return False
    return True


def validate_pose(maze: Maze, pose: Pose):
    cx, cy = maze.cell_of(pose.x, pose.y)
    if maze.is_wall(cx, cy):
        raise ValueError(f"Pose ({pose.x:.3f}, {pose.y:.3f}) lies inside wall cell ({cx}, {cy})")


def step(maze: Maze, pose: Pose, action: PrimitiveAction) -> Tuple[Pose, bool]:
    """Apply one primitive action.

    Returns:
        (next pose, collided). A blocked MoveForward leaves the pose unchanged.
    """
    if action is PrimitiveAction.TURN_LEFT:
        return Pose(pose.x, pose.y, (pose.heading + HEADING_STEP) % 360), False
    if action is PrimitiveAction.TURN_RIGHT:
        return Pose(pose.x, pose.y, (pose.heading - HEADING_STEP) % 360), False
    if action is PrimitiveAction.STOP:
        return pose, False

    ux, uy = heading_vector(pose.heading)
    x = pose.x + FORWARD_STEP * ux
    y = pose.y + FORWARD_STEP * uy
    if not clearance_ok(maze, x, y):
        return pose, True
    return Pose(x, y, pose.heading), False
