from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from src.domain.entities.base import Entity

HEADING_STEP = 30
# coarse texture cells across a wall face and up the wall, each split into
# TEXTURE_DETAIL x TEXTURE_DETAIL fine cells of low-amplitude noise
TEXTURE_STRIPES = 12
TEXTURE_BANDS = 12
TEXTURE_DETAIL = 4
TEXTURE_DETAIL_AMPLITUDE = 0.16


@dataclass(frozen=True)
class SceneObject:
    """Goal object standing at the center of a free cell."""
    object_id: str
    cx: int
    cy: int
    appearance_seed: int


@dataclass(frozen=True)
class Pose:
    """Agent pose: continuous position in meters, heading in degrees.

    Heading 0 looks along +x; positive headings turn counterclockwise (left).
    """
    x: float
    y: float
    heading: int

    def __post_init__(self):
        if self.heading % HEADING_STEP != 0 or not 0 <= self.heading < 360:
            raise ValueError(f"Heading must be a multiple of {HEADING_STEP} in [0, 330], got {self.heading}")


@dataclass(frozen=True)
class GoalSpec:
    """Navigation goal: reach and see a scene object."""
    object_id: str
    success_radius: float = 1.0

    def __post_init__(self):
        if self.success_radius <= 0:
            raise ValueError("success_radius must be positive")


class Maze(Entity):
    """Occupancy-grid scene: a room topology (walls) plus a layout (objects).

    ``cells[cy, cx]`` is True for wall cells. The maze is immutable after
    construction.
    """

    def __init__(
        self,
        id: str,
        cells: np.ndarray,
        objects: List[SceneObject],
        wall_texture_seed: int,
        cell_size: float = 0.5
    ):
        super().__init__(id)
        cells = np.asarray(cells, dtype=bool).copy()
        if cells.ndim != 2:
            raise ValueError("Maze cells must be a 2-D grid")
        cells.flags.writeable = False
        self.cells = cells
        self.cell_size = float(cell_size)
        self.wall_texture_seed = int(wall_texture_seed)
        seen = set()
        for obj in objects:
            if obj.object_id in seen:
                raise ValueError(f"Duplicate object id: {obj.object_id}")
            if self.is_wall(obj.cx, obj.cy):
                raise ValueError(f"Object {obj.object_id} placed in a wall cell ({obj.cx}, {obj.cy})")
            seen.add(obj.object_id)
        self.objects = tuple(objects)
        self._texture: Optional[np.ndarray] = None
        self._distance_fields = {}

    @property
    def width(self) -> int:
        return self.cells.shape[1]

    @property
    def height(self) -> int:
        return self.cells.shape[0]

    def is_wall(self, cx: int, cy: int) -> bool:
        """Out-of-bounds cells count as walls."""
        if cx < 0 or cy < 0 or cx >= self.width or cy >= self.height:
            return True
        return bool(self.cells[cy, cx])

    def cell_of(self, x: float, y: float) -> Tuple[int, int]:
        return int(np.floor(x / self.cell_size)), int(np.floor(y / self.cell_size))

    def cell_center(self, cx: int, cy: int) -> Tuple[float, float]:
        return (cx + 0.5) * self.cell_size, (cy + 0.5) * self.cell_size

    def free_cells(self) -> List[Tuple[int, int]]:
        """Free cells in row-major order as (cx, cy)."""
        ys, xs = np.nonzero(~self.cells)
        return [(int(cx), int(cy)) for cy, cx in zip(ys, xs)]

    def get_object(self, object_id: str) -> SceneObject:
        for obj in self.objects:
            if obj.object_id == object_id:
                return obj
        raise ValueError(f"Unknown object id '{object_id}' in scene {self.id}")

    def object_center(self, object_id: str) -> Tuple[float, float]:
        obj = self.get_object(object_id)
        return self.cell_center(obj.cx, obj.cy)

    def wall_texture(self) -> np.ndarray:
        """Wall intensities indexed by [cy, cx, face, band, stripe].

        Random coarse cells plus fine detail noise; no two cells share a
        pattern, so displaced wall patches have a single best match.
        """
        if self._texture is None:
            rng = np.random.default_rng([self.wall_texture_seed, self.width, self.height])
            coarse = rng.uniform(0.3, 1.0, size=(self.height, self.width, 4, TEXTURE_BANDS, TEXTURE_STRIPES))
            coarse = coarse.repeat(TEXTURE_DETAIL, axis=3).repeat(TEXTURE_DETAIL, axis=4)
            detail = rng.uniform(-0.5, 0.5, size=coarse.shape) * TEXTURE_DETAIL_AMPLITUDE
            texture = np.clip(coarse + detail, 0.0, 1.0)
            texture.flags.writeable = False
            self._texture = texture
        return self._texture

    def same_content(self, other: "Maze") -> bool:
        """Bit-level equality of the scene content (ignores the id)."""
        return (
            np.array_equal(self.cells, other.cells)
            and self.objects == other.objects
            and self.cell_size == other.cell_size
            and self.wall_texture_seed == other.wall_texture_seed
        )
