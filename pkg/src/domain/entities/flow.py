from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.domain.entities.enums import DecoderKind


@dataclass(frozen=True)
class FlowField:
    """Per-block integer displacement field between two frames.

    ``vectors`` has shape (grid_h, grid_w, 2) holding (dx, dy) in pixels:
    content at block (i, j) of frame t sits at +(dx, dy) in frame t+1.
    ``valid`` marks blocks whose match survived a forward-backward check.
    """
    vectors: np.ndarray
    block_size: int
    search_radius: int
    search_radius_y: int
    frame_height: int
    frame_width: int
    valid: Optional[np.ndarray] = None

    @property
    def grid_shape(self):
        return self.vectors.shape[:2]

    def flat(self) -> np.ndarray:
        return self.vectors.reshape(-1, 2)

    def valid_indices(self) -> np.ndarray:
        """Flat indices of the blocks that passed the consistency check (all when unchecked)."""
        if self.valid is None:
            return np.arange(self.vectors.shape[0] * self.vectors.shape[1])
        return np.flatnonzero(self.valid)


@dataclass(frozen=True)
class DominantVectors:
    """Upper-decile subset of a flow field."""
    vectors: np.ndarray
    indices: np.ndarray
    threshold: float

    def __len__(self):
        return len(self.vectors)

    def mean(self) -> np.ndarray:
        return self.vectors.astype(np.float64).mean(axis=0)


@dataclass(frozen=True)
class DecoderParams:
    """Pseudo-action decoding thresholds and flow search window."""
    tau_x: float = 20.0
    tau_y: float = 6.0
    kind: DecoderKind = DecoderKind.FLOW
    block_size: int = 8
    search_radius: int = 34
    search_radius_y: Optional[int] = 6
    patch_size: int = 9
    max_corners: int = 64
    consistency_tolerance: Optional[int] = 2

    def __post_init__(self):
        if self.tau_x <= 0 or self.tau_y <= 0:
            raise ValueError("tau_x and tau_y must be positive")
        if self.consistency_tolerance is not None and self.consistency_tolerance < 0:
            raise ValueError(f"consistency_tolerance must be >= 0, got {self.consistency_tolerance}")
