"""Egocentric column raycaster.

Camera sits at mid wall height; walls are 1 m tall. Column 0 is the left
edge of the image.
"""
import math
from dataclasses import dataclass
from typing import List

import numpy as np

from src.domain.entities.frame import Frame
from src.domain.entities.maze import Maze, Pose
from src.domain.services.kinematics import heading_vector, validate_pose

FIELD_OF_VIEW = 60.0
MIN_RESOLUTION = 16
WALL_HALF_HEIGHT = 0.5
OBJECT_HALF_SIZE = 0.15
CEILING_INTENSITY = 0.15
SIDE_SHADE = 0.8
_MIN_DEPTH = 0.05

# face ids into the wall texture
FACE_WEST, FACE_EAST, FACE_SOUTH, FACE_NORTH = 0, 1, 2, 3


@dataclass(frozen=True)
class ColumnHit:
    """Ray result for one image column."""
    distance: float
    cx: int
    cy: int
    face: int
    offset: float


def focal_length(width: int, fov: float = FIELD_OF_VIEW) -> float:
    return (width / 2.0) / math.tan(math.radians(fov / 2.0))


def slice_height(distance: float, width: int, fov: float = FIELD_OF_VIEW) -> float:
    """Projected wall slice height in pixels at a perpendicular distance (meters)."""
    return 2.0 * focal_length(width, fov) * WALL_HALF_HEIGHT / max(distance, 1e-9)


def cast_columns(maze: Maze, pose: Pose, width: int, fov: float = FIELD_OF_VIEW) -> List[ColumnHit]:
    """Cast one ray per column and return perpendicular wall hits."""
    ux, uy = heading_vector(pose.heading)
    lx, ly = -uy, ux
    half_tan = math.tan(math.radians(fov / 2.0))
    size = maze.cell_size
    px, py = pose.x / size, pose.y / size
    hits = []
    for c in range(width):
        s = (1.0 - 2.0 * (c + 0.5) / width) * half_tan
        hits.append(_cast(maze, px, py, ux + lx * s, uy + ly * s, size))
    return hits


def _cast(maze: Maze, px: float, py: float, rx: float, ry: float, size: float) -> ColumnHit:
    cx, cy = int(math.floor(px)), int(math.floor(py))
    delta_x = abs(1.0 / rx) if rx != 0 else math.inf
    delta_y = abs(1.0 / ry) if ry != 0 else math.inf
    if rx < 0:
        step_x, side_x = -1, (px - cx) * delta_x
    else:
        step_x, side_x = 1, (cx + 1.0 - px) * delta_x
    if ry < 0:
        step_y, side_y = -1, (py - cy) * delta_y
    else:
        step_y, side_y = 1, (cy + 1.0 - py) * delta_y

    limit = 4 * (maze.width + maze.height)
    y_side = False
    for _ in range(limit):
        if side_x < side_y:
            side_x += delta_x
            cx += step_x
            y_side = False
        else:
            side_y += delta_y
            cy += step_y
            y_side = True
        if maze.is_wall(cx, cy):
            break

    if y_side:
        perp = side_y - delta_y
        offset = px + perp * rx
        face = FACE_SOUTH if step_y > 0 else FACE_NORTH
    else:
        perp = side_x - delta_x
        offset = py + perp * ry
        face = FACE_WEST if step_x > 0 else FACE_EAST
    offset -= math.floor(offset)
    return ColumnHit(distance=perp * size, cx=cx, cy=cy, face=face, offset=offset)


def render(maze: Maze, pose: Pose, width: int = 64, height: int = 64, fov: float = FIELD_OF_VIEW) -> Frame:
    """Render the grayscale egocentric view of ``pose``.

    Args:
        maze: Scene to render.
        pose: Camera pose; must lie in a free cell.
        width: Image width in pixels (>= 16).
        height: Image height in pixels (>= 16).
        fov: Horizontal field of view in degrees.

    Returns:
        8-bit quantized Frame.
    """
    if width < MIN_RESOLUTION or height < MIN_RESOLUTION:
        raise ValueError(f"Render resolution must be at least {MIN_RESOLUTION}x{MIN_RESOLUTION}")
    validate_pose(maze, pose)

    horizon = height / 2.0
    rows = np.arange(height) + 0.5
    image = np.empty((height, width), dtype=np.float64)
    image[rows < horizon, :] = CEILING_INTENSITY
    floor_rows = rows >= horizon
    image[floor_rows, :] = (0.25 + 0.35 * (rows[floor_rows] - horizon) / horizon)[:, None]

    texture = maze.wall_texture()
    n_bands, n_stripes = texture.shape[3:]
    f = focal_length(width, fov)
    depth = np.empty(width, dtype=np.float64)
    for c, hit in enumerate(cast_columns(maze, pose, width, fov)):
        depth[c] = hit.distance
        half = f * WALL_HALF_HEIGHT / max(hit.distance, 1e-9)
        mask = np.abs(rows - horizon) < half
        if not mask.any():
            continue
        # texture coordinates: stripe across the face, band down the wall
        stripe = min(int(hit.offset * n_stripes), n_stripes - 1)
        v = (rows[mask] - (horizon - half)) / (2.0 * half)
        band = np.clip(np.floor(v * n_bands).astype(np.int64), 0, n_bands - 1)
        if _in_grid(maze, hit):
            values = texture[hit.cy, hit.cx, hit.face, band, stripe]
        else:
            values = np.full(band.shape, 0.5)
        if hit.face in (FACE_SOUTH, FACE_NORTH):
            values = values * SIDE_SHADE
        image[mask, c] = values

    _draw_objects(maze, pose, image, depth, f, fov)
    return Frame.from_intensities(image)


def _in_grid(maze: Maze, hit: ColumnHit) -> bool:
    return 0 <= hit.cx < maze.width and 0 <= hit.cy < maze.height


def _draw_objects(maze: Maze, pose: Pose, image: np.ndarray, depth: np.ndarray, f: float, fov: float):
    height, width = image.shape
    ux, uy = heading_vector(pose.heading)
    lx, ly = -uy, ux
    half_tan = math.tan(math.radians(fov / 2.0))
    horizon = height / 2.0
    cols = np.arange(width) + 0.5
    rows = np.arange(height) + 0.5

    placed = []
    for obj in maze.objects:
        ox, oy = maze.cell_center(obj.cx, obj.cy)
        rel_x, rel_y = ox - pose.x, oy - pose.y
        forward = rel_x * ux + rel_y * uy
        if forward < _MIN_DEPTH:
            continue
        lateral = rel_x * lx + rel_y * ly
        center = (1.0 - lateral / (forward * half_tan)) * width / 2.0
        placed.append((forward, center, obj))

    # painter's order, farthest first
    for forward, center, obj in sorted(placed, key=lambda item: (-item[0], item[2].object_id)):
        half = f * OBJECT_HALF_SIZE / forward
        col_mask = (np.abs(cols - center) < half) & (forward < depth)
        row_mask = np.abs(rows - horizon) < half
        if not col_mask.any() or not row_mask.any():
            continue
        pattern = np.random.default_rng(obj.appearance_seed).uniform(0.0, 1.0, size=(4, 4))
        u = np.clip(((cols[col_mask] - (center - half)) / (2.0 * half) * 4).astype(np.int64), 0, 3)
        v = np.clip(((rows[row_mask] - (horizon - half)) / (2.0 * half) * 4).astype(np.int64), 0, 3)
        image[np.ix_(row_mask, col_mask)] = pattern[np.ix_(v, u)]
        depth[col_mask] = forward
