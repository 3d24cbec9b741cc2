from collections import deque
from typing import Optional, Set, Tuple

import numpy as np

from src.domain.entities.maze import Maze, SceneObject

LOOP_PROBABILITY = 0.1
MIN_SIDE = 5


def generate_maze(
    seed: int,
    width: int,
    height: int,
    n_objects: int,
    layout_seed: Optional[int] = None,
    maze_id: Optional[str] = None,
    cell_size: float = 0.5
) -> Maze:
    """Carve a connected maze and place goal objects.

    The wall grid and wall texture depend on ``seed`` (the room topology);
    object placement depends on ``layout_seed`` (defaults to ``seed``).

    Args:
        seed: Topology seed.
        width: Cells along x (>= 5).
        height: Cells along y (>= 5).
        n_objects: Number of objects, at most the number of free cells.
        layout_seed: Object placement seed.
        maze_id: Scene id; derived from the seeds when omitted.
        cell_size: Meters per cell.

    Returns:
        Immutable Maze.
    """
    if width < MIN_SIDE or height < MIN_SIDE:
        raise ValueError(f"Maze must be at least {MIN_SIDE}x{MIN_SIDE} cells, got {width}x{height}")
    if n_objects < 1:
        raise ValueError("n_objects must be at least 1")

    rng = np.random.default_rng([seed, width, height])
    cells = _carve(rng, width, height)
    _add_loops(rng, cells)
    wall_texture_seed = int(rng.integers(0, 2**31 - 1))

    free = [(int(cx), int(cy)) for cy, cx in zip(*np.nonzero(~cells))]
    if n_objects > len(free):
        raise ValueError(f"n_objects={n_objects} exceeds the {len(free)} free cells of the maze")

    layout_rng = np.random.default_rng([seed if layout_seed is None else layout_seed, width, height, n_objects, 1])
    chosen = sorted(layout_rng.choice(len(free), size=n_objects, replace=False).tolist())
    objects = [
        SceneObject(
            object_id=f"obj{i}",
            cx=free[index][0],
            cy=free[index][1],
            appearance_seed=int(layout_rng.integers(0, 2**31 - 1))
        )
        for i, index in enumerate(chosen)
    ]

    if maze_id is None:
        maze_id = f"maze_s{seed}" if layout_seed is None else f"maze_s{seed}_l{layout_seed}"
    return Maze(id=maze_id, cells=cells, objects=objects, wall_texture_seed=wall_texture_seed, cell_size=cell_size)


def _carve(rng: np.random.Generator, width: int, height: int) -> np.ndarray:
    """Recursive backtracker over the odd-coordinate lattice."""
    cells = np.ones((height, width), dtype=bool)
    start = (1, 1)
    cells[start[1], start[0]] = False
    stack = [start]
    while stack:
        cx, cy = stack[-1]
        neighbours = [
            (cx + dx, cy + dy)
            for dx, dy in ((2, 0), (-2, 0), (0, 2), (0, -2))
            if 1 <= cx + dx <= width - 2 and 1 <= cy + dy <= height - 2 and cells[cy + dy, cx + dx]
        ]
        if not neighbours:
            stack.pop()
            continue
        nx, ny = neighbours[int(rng.integers(len(neighbours)))]
        cells[(cy + ny) // 2, (cx + nx) // 2] = False
        cells[ny, nx] = False
        stack.append((nx, ny))
    return cells


def _add_loops(rng: np.random.Generator, cells: np.ndarray):
    """Open interior walls separating two free cells, each with LOOP_PROBABILITY."""
    height, width = cells.shape
    for cy in range(1, height - 1):
        for cx in range(1, width - 1):
            if not cells[cy, cx]:
                continue
            horizontal = not cells[cy, cx - 1] and not cells[cy, cx + 1]
            vertical = not cells[cy - 1, cx] and not cells[cy + 1, cx]
            if horizontal or vertical:
                if rng.random() < LOOP_PROBABILITY:
                    cells[cy, cx] = False


def is_connected(cells: np.ndarray) -> bool:
    """Flood fill from the first free cell reaches every free cell."""
    free: Set[Tuple[int, int]] = {(int(cx), int(cy)) for cy, cx in zip(*np.nonzero(~cells))}
    if not free:
        return False
    start = min(free, key=lambda c: (c[1], c[0]))
    seen = {start}
    queue = deque([start])
    while queue:
        cx, cy = queue.popleft()
        for nxt in ((cx + 1, cy), (cx - 1, cy), (cx, cy + 1), (cx, cy - 1)):
            if nxt in free and nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return len(seen) == len(free)
