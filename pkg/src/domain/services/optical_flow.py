"""Block-matching flow and the upper-decile dominant-vector filter."""
import dataclasses
from typing import Optional, Tuple

import numpy as np

from src.domain.entities.flow import DominantVectors, FlowField
from src.domain.entities.frame import Frame

# SAD cost of a candidate pixel falling outside the second frame
OUT_OF_BOUNDS_COST = 255


def candidate_offsets(search_radius: int, search_radius_y: int) -> np.ndarray:
    """All (dx, dy) offsets of the window ordered by magnitude, then dy, then dx."""
    dys, dxs = np.mgrid[-search_radius_y:search_radius_y + 1, -search_radius:search_radius + 1]
    dxs, dys = dxs.ravel(), dys.ravel()
    order = np.lexsort((dxs, dys, dxs * dxs + dys * dys))
    return np.stack([dxs[order], dys[order]], axis=1)


def block_match_flow(
    f1: Frame,
    f2: Frame,
    block_size: int = 8,
    search_radius: int = 6,
    search_radius_y: Optional[int] = None
) -> FlowField:
    """Integer SAD block matching from ``f1`` to ``f2``.

    Args:
        f1: Source frame.
        f2: Target frame, same dimensions.
        block_size: Square block side in pixels (>= 4).
        search_radius: Horizontal search radius in pixels (>= 1).
        search_radius_y: Vertical search radius; defaults to ``search_radius``.

    Returns:
        FlowField with one (dx, dy) per block. Ties resolve to the smallest
        displacement, then lexicographically smallest (dy, dx).
    """
    if f1.pixels.shape != f2.pixels.shape:
        raise ValueError(f"Frame dimensions differ: {f1.pixels.shape} vs {f2.pixels.shape}")
    if block_size < 4:
        raise ValueError(f"block_size must be >= 4, got {block_size}")
    if block_size > min(f1.height, f1.width):
        raise ValueError(f"block_size {block_size} exceeds frame dimension {min(f1.height, f1.width)}")
    if search_radius < 1:
        raise ValueError(f"search_radius must be >= 1, got {search_radius}")
    ry = search_radius if search_radius_y is None else search_radius_y
    if ry < 0:
        raise ValueError(f"search_radius_y must be >= 0, got {ry}")
    rx = search_radius

    gh, gw = f1.height // block_size, f1.width // block_size
    src = f1.to_bytes()[:gh * block_size, :gw * block_size].astype(np.int32)
    padded = np.full((f2.height + 2 * ry, f2.width + 2 * rx), -1, dtype=np.int32)
    padded[ry:ry + f2.height, rx:rx + f2.width] = f2.to_bytes()

    offsets = candidate_offsets(rx, ry)
    costs = np.empty((len(offsets), gh, gw), dtype=np.int64)
    for k, (dx, dy) in enumerate(offsets):
        target = padded[ry + dy:ry + dy + gh * block_size, rx + dx:rx + dx + gw * block_size]
        diff = np.where(target < 0, OUT_OF_BOUNDS_COST, np.abs(src - target))
        costs[k] = diff.reshape(gh, block_size, gw, block_size).sum(axis=(1, 3))

    best = np.argmin(costs, axis=0)
    vectors = offsets[best].astype(np.int64)
    vectors.flags.writeable = False
    return FlowField(
        vectors=vectors,
        block_size=block_size,
        search_radius=rx,
        search_radius_y=ry,
        frame_height=f1.height,
        frame_width=f1.width
    )


def dominant_subset(vectors: np.ndarray) -> DominantVectors:
    """Keep vectors whose magnitude reaches the nearest-rank 90th percentile."""
    vectors = np.asarray(vectors).reshape(-1, 2)
    n = len(vectors)
    if n == 0:
        raise ValueError("Cannot filter an empty flow field")
    magnitudes = np.hypot(vectors[:, 0], vectors[:, 1])
    rank = min((9 * n + 9) // 10, n - 1)
    threshold = float(np.sort(magnitudes)[rank])
    indices = np.nonzero(magnitudes >= threshold)[0]
    return DominantVectors(vectors=vectors[indices], indices=indices, threshold=threshold)


def consistent_flow(
    f1: Frame,
    f2: Frame,
    block_size: int = 8,
    search_radius: int = 6,
    search_radius_y: Optional[int] = None,
    tolerance: int = 2
) -> FlowField:
    """Block matching with a forward-backward consistency check.

    A block is valid when the backward vector of the f2 block its center
    lands in brings it back within ``tolerance`` pixels on each axis. Content
    that leaves the view or is uncovered between the frames has no such
    round trip.
    """
    forward = block_match_flow(f1, f2, block_size, search_radius, search_radius_y)
    backward = block_match_flow(f2, f1, block_size, search_radius, search_radius_y)
    gh, gw = forward.grid_shape
    rows, cols = np.mgrid[0:gh, 0:gw]
    center = block_size // 2
    land_col = (cols * block_size + center + forward.vectors[..., 0]) // block_size
    land_row = (rows * block_size + center + forward.vectors[..., 1]) // block_size
    inside = (land_row >= 0) & (land_row < gh) & (land_col >= 0) & (land_col < gw)
    back = backward.vectors[np.clip(land_row, 0, gh - 1), np.clip(land_col, 0, gw - 1)]
    round_trip = np.abs(forward.vectors + back).max(axis=-1)
    valid = inside & (round_trip <= tolerance)
    valid.flags.writeable = False
    return dataclasses.replace(forward, valid=valid)


def filter_dominant(field: FlowField) -> DominantVectors:
    """Upper decile of the valid blocks; the whole field when none is valid.

    Returned indices point into ``field.flat()``.
    """
    indices = field.valid_indices()
    if len(indices) == 0:
        return dominant_subset(field.flat())
    dom = dominant_subset(field.flat()[indices])
    return dataclasses.replace(dom, indices=indices[dom.indices])


def flow_shift_agreement(field: FlowField, shift: Tuple[int, int], margin: int = 1) -> float:
    """Fraction of interior blocks whose vector equals ``shift``."""
    gh, gw = field.grid_shape
    interior = field.vectors[margin:gh - margin, margin:gw - margin].reshape(-1, 2)
    if len(interior) == 0:
        return 0.0
    return float(np.mean(np.all(interior == np.asarray(shift), axis=1)))
