"""Goal logic: success predicate, visibility and the geodesic-distance oracle."""
import math
from collections import deque
from typing import Tuple

import numpy as np

from src.domain.entities.maze import GoalSpec, Maze, Pose
from src.domain.exceptions import UnreachableGoalError
from src.domain.services.kinematics import heading_vector

SUBCELLS_PER_CELL = 4
FIELD_OF_VIEW = 60.0
_UNREACHED = -1


def line_of_sight(maze: Maze, x0: float, y0: float, x1: float, y1: float) -> bool:
    """Grid traversal from (x0, y0) to (x1, y1); False if any wall cell is crossed."""
    size = maze.cell_size
    cx, cy = maze.cell_of(x0, y0)
    tx, ty = maze.cell_of(x1, y1)
    dx, dy = x1 - x0, y1 - y0
    step_x = 1 if dx > 0 else -1
    step_y = 1 if dy > 0 else -1
    if dx != 0:
        next_x = (cx + (1 if dx > 0 else 0)) * size
        t_max_x = (next_x - x0) / dx
        t_delta_x = size / abs(dx)
    else:
        t_max_x = t_delta_x = math.inf
    if dy != 0:
        next_y = (cy + (1 if dy > 0 else 0)) * size
        t_max_y = (next_y - y0) / dy
        t_delta_y = size / abs(dy)
    else:
        t_max_y = t_delta_y = math.inf

    while (cx, cy) != (tx, ty):
        if maze.is_wall(cx, cy):
            return False
        if t_max_x < t_max_y:
            if t_max_x > 1.0:
                break
            cx += step_x
            t_max_x += t_delta_x
        else:
            if t_max_y > 1.0:
                break
            cy += step_y
            t_max_y += t_delta_y
    return not maze.is_wall(cx, cy)


def in_field_of_view(pose: Pose, x: float, y: float, fov: float = FIELD_OF_VIEW) -> bool:
    dx, dy = x - pose.x, y - pose.y
    if math.hypot(dx, dy) < 1e-9:
        return True
    ux, uy = heading_vector(pose.heading)
    bearing = math.atan2(dy, dx)
    facing = math.atan2(uy, ux)
    off = (bearing - facing + math.pi) % (2 * math.pi) - math.pi
    return abs(math.degrees(off)) <= fov / 2 + 1e-9


def is_visible(maze: Maze, pose: Pose, object_id: str, fov: float = FIELD_OF_VIEW) -> bool:
    ox, oy = maze.object_center(object_id)
    return in_field_of_view(pose, ox, oy, fov) and line_of_sight(maze, pose.x, pose.y, ox, oy)


def is_success(maze: Maze, pose: Pose, goal: GoalSpec, fov: float = FIELD_OF_VIEW) -> bool:
    """Within success radius of the object center and the object is visible."""
    ox, oy = maze.object_center(goal.object_id)
    if math.hypot(ox - pose.x, oy - pose.y) > goal.success_radius:
        return False
    return is_visible(maze, pose, goal.object_id, fov)


def successful_objects(maze: Maze, pose: Pose, success_radius: float = 1.0) -> Tuple[str, ...]:
    """Object ids whose success predicate holds at ``pose``."""
    return tuple(
        obj.object_id for obj in maze.objects
        if is_success(maze, pose, GoalSpec(obj.object_id, success_radius))
    )


def distance_field(maze: Maze, object_id: str) -> np.ndarray:
    """BFS step counts on the subcell grid toward the object's center subcell.

    Cached on the maze; -1 marks unreachable or wall subcells.
    """
    cached = maze._distance_fields.get(object_id)
    if cached is not None:
        return cached
    obj = maze.get_object(object_id)
    n = SUBCELLS_PER_CELL
    free = np.repeat(np.repeat(~maze.cells, n, axis=0), n, axis=1)
    steps = np.full(free.shape, _UNREACHED, dtype=np.int64)
    start = (obj.cy * n + n // 2, obj.cx * n + n // 2)
    steps[start] = 0
    queue = deque([start])
    rows, cols = free.shape
    while queue:
        r, c = queue.popleft()
        d = steps[r, c] + 1
        for nr, nc in ((r + 1, c), (r - 1, c), (r, c + 1), (r, c - 1)):
            if 0 <= nr < rows and 0 <= nc < cols and free[nr, nc] and steps[nr, nc] == _UNREACHED:
                steps[nr, nc] = d
                queue.append((nr, nc))
    steps.flags.writeable = False
    maze._distance_fields[object_id] = steps
    return steps


def geodesic_distance(maze: Maze, pose: Pose, goal: GoalSpec) -> float:
    """Shortest free-space path length in meters from the pose to the goal object.

    Returns 0.0 when the agent already stands in the object's cell.
    """
    obj = maze.get_object(goal.object_id)
    if maze.cell_of(pose.x, pose.y) == (obj.cx, obj.cy):
        return 0.0
    field = distance_field(maze, goal.object_id)
    quantum = maze.cell_size / SUBCELLS_PER_CELL
    r = int(math.floor(pose.y / quantum))
    c = int(math.floor(pose.x / quantum))
    if not (0 <= r < field.shape[0] and 0 <= c < field.shape[1]) or field[r, c] == _UNREACHED:
        raise UnreachableGoalError(
            f"Object {goal.object_id} is unreachable from ({pose.x:.3f}, {pose.y:.3f}) in {maze.id}"
        )
    return float(field[r, c]) * quantum
