"""Rule-based pseudo-action decoding from frame pairs."""
import dataclasses
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from src.domain.entities.enums import DecoderKind, PrimitiveAction
from src.domain.entities.flow import DecoderParams, DominantVectors, FlowField
from src.domain.entities.frame import Frame
from src.domain.entities.video import LabeledTrajectory, Video
from src.domain.services.optical_flow import (
    block_match_flow, consistent_flow, dominant_subset, filter_dominant
)

MIN_CORNERS = 4
HARRIS_K = 0.04
HARRIS_RELATIVE_THRESHOLD = 0.01

# half-pixel steps up to 5 px, then whole turn-scale shifts up to 32 px
TAU_X_GRID = tuple(0.5 * i for i in range(1, 11)) + tuple(float(i) for i in range(6, 33, 2))
TAU_Y_GRID = tuple(float(i) for i in range(1, 9))


@dataclass(frozen=True)
class KeypointDecodeResult:
    action: PrimitiveAction
    low_confidence: bool
    n_corners: int


@dataclass
class CalibrationResult:
    params: DecoderParams
    accuracy: float
    grid: Dict[Tuple[float, float], float] = field(default_factory=dict)


def classify_mean(mx: float, my: float, tau_x: float, tau_y: float) -> PrimitiveAction:
    """Threshold rule: content moving right means the camera yawed left."""
    if abs(mx) > tau_x and abs(my) <= tau_y:
        return PrimitiveAction.TURN_LEFT if mx > 0 else PrimitiveAction.TURN_RIGHT
    return PrimitiveAction.MOVE_FORWARD


def decode_action(dom: DominantVectors, params: DecoderParams) -> PrimitiveAction:
    if len(dom) == 0:
        raise ValueError("Cannot decode an action from an empty dominant set")
    mx, my = dom.mean()
    return classify_mean(float(mx), float(my), params.tau_x, params.tau_y)


def harris_corners(frame: Frame, max_corners: int, border: int) -> np.ndarray:
    """Harris corners as (row, col), strongest first, at least ``border`` px from the edge."""
    img = frame.pixels
    gy, gx = np.gradient(img)

    def box3(a):
        p = np.pad(a, 1, mode="edge")
        return sliding_window_view(p, (3, 3)).sum(axis=(2, 3))

    sxx, syy, sxy = box3(gx * gx), box3(gy * gy), box3(gx * gy)
    response = sxx * syy - sxy * sxy - HARRIS_K * (sxx + syy) ** 2
    peak = response.max()
    if peak <= 0:
        return np.empty((0, 2), dtype=np.int64)
    local_max = sliding_window_view(np.pad(response, 1, mode="constant", constant_values=-np.inf), (3, 3)).max(axis=(2, 3))
    keep = (response > HARRIS_RELATIVE_THRESHOLD * peak) & (response >= local_max)
    h, w = img.shape
    keep[:border, :] = False
    keep[h - border:, :] = False
    keep[:, :border] = False
    keep[:, w - border:] = False
    rows, cols = np.nonzero(keep)
    order = np.argsort(-response[rows, cols], kind="stable")[:max_corners]
    return np.stack([rows[order], cols[order]], axis=1)


def match_keypoints(f1: Frame, f2: Frame, corners: np.ndarray, params: DecoderParams) -> np.ndarray:
    """Patch SAD displacement (dx, dy) of each corner; candidates must fit inside f2."""
    half = params.patch_size // 2
    a = f1.to_bytes().astype(np.int32)
    b = f2.to_bytes().astype(np.int32)
    h, w = b.shape
    rx = params.search_radius
    ry = rx if params.search_radius_y is None else params.search_radius_y
    windows = sliding_window_view(b, (params.patch_size, params.patch_size))
    vectors = []
    for r, c in corners:
        patch = a[r - half:r + half + 1, c - half:c + half + 1]
        r0, r1 = max(half, r - ry), min(h - 1 - half, r + ry)
        c0, c1 = max(half, c - rx), min(w - 1 - half, c + rx)
        costs = np.abs(windows[r0 - half:r1 - half + 1, c0 - half:c1 - half + 1] - patch).sum(axis=(2, 3))
        dys, dxs = np.mgrid[r0 - r:r1 - r + 1, c0 - c:c1 - c + 1]
        cost, dxs, dys = costs.ravel(), dxs.ravel(), dys.ravel()
        best = np.lexsort((dxs, dys, dxs * dxs + dys * dys, cost))[0]
        vectors.append((int(dxs[best]), int(dys[best])))
    return np.asarray(vectors, dtype=np.int64).reshape(-1, 2)


def keypoint_decode(f1: Frame, f2: Frame, params: DecoderParams) -> KeypointDecodeResult:
    """Sparse-matching decoder: corners in f1 matched into f2, then the same decile rule.

    Fewer than four corners yields MoveForward flagged as low confidence.
    """
    dom, n_corners = _keypoint_dominant(f1, f2, params)
    if dom is None:
        return KeypointDecodeResult(PrimitiveAction.MOVE_FORWARD, True, n_corners)
    return KeypointDecodeResult(decode_action(dom, params), False, n_corners)


def _keypoint_dominant(f1: Frame, f2: Frame, params: DecoderParams) -> Tuple[Optional[DominantVectors], int]:
    if f1.pixels.shape != f2.pixels.shape:
        raise ValueError(f"Frame dimensions differ: {f1.pixels.shape} vs {f2.pixels.shape}")
    corners = harris_corners(f1, params.max_corners, border=params.patch_size // 2)
    if len(corners) < MIN_CORNERS:
        return None, len(corners)
    return dominant_subset(match_keypoints(f1, f2, corners, params)), len(corners)


def keypoint_mean(f1: Frame, f2: Frame, params: DecoderParams) -> Optional[Tuple[float, float]]:
    """Mean dominant matched-corner vector, or None for a low-confidence pair."""
    dom, _ = _keypoint_dominant(f1, f2, params)
    if dom is None:
        return None
    mx, my = dom.mean()
    return float(mx), float(my)


def pair_flow(f1: Frame, f2: Frame, params: DecoderParams) -> FlowField:
    if params.consistency_tolerance is None:
        return block_match_flow(f1, f2, params.block_size, params.search_radius, params.search_radius_y)
    return consistent_flow(
        f1, f2, params.block_size, params.search_radius, params.search_radius_y, params.consistency_tolerance
    )


def pair_mean(f1: Frame, f2: Frame, params: DecoderParams) -> Tuple[float, float]:
    """Mean dominant flow vector of a frame pair under the flow decoder."""
    mx, my = filter_dominant(pair_flow(f1, f2, params)).mean()
    return float(mx), float(my)


def decoder_mean(f1: Frame, f2: Frame, params: DecoderParams) -> Optional[Tuple[float, float]]:
    """The mean vector the configured decoder thresholds; None means MoveForward outright."""
    if params.kind is DecoderKind.MATCHING:
        return keypoint_mean(f1, f2, params)
    return pair_mean(f1, f2, params)


def decode_pair(f1: Frame, f2: Frame, params: DecoderParams) -> PrimitiveAction:
    mean = decoder_mean(f1, f2, params)
    if mean is None:
        return PrimitiveAction.MOVE_FORWARD
    return classify_mean(mean[0], mean[1], params.tau_x, params.tau_y)


def label_frames(
    video_id: str,
    frames: Sequence[Frame],
    params: DecoderParams,
    success_objects: Optional[List[Tuple[str, ...]]] = None,
    workers: int = 1
) -> LabeledTrajectory:
    if len(frames) < 2:
        raise ValueError(f"Video {video_id} has {len(frames)} frames; labeling needs at least 2")
    pairs = list(zip(frames[:-1], frames[1:]))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            actions = list(pool.map(lambda p: decode_pair(p[0], p[1], params), pairs))
    else:
        actions = [decode_pair(a, b, params) for a, b in pairs]
    return LabeledTrajectory(
        video_id=video_id,
        frames=list(frames),
        pseudo_actions=actions,
        decoder=params.kind,
        tau_x=params.tau_x,
        tau_y=params.tau_y,
        success_objects=list(success_objects) if success_objects is not None else []
    )


def label_video(video: Video, params: DecoderParams, workers: int = 1) -> LabeledTrajectory:
    """Decode T-1 pseudo-actions for a video (flow -> decile filter -> threshold)."""
    return label_frames(video.id, video.frames, params, video.success_objects, workers)


def labeling_accuracy(pseudo: Sequence[PrimitiveAction], oracle: Sequence[PrimitiveAction]) -> float:
    if len(pseudo) != len(oracle):
        raise ValueError(f"Label length {len(pseudo)} does not match oracle length {len(oracle)}")
    if not pseudo:
        raise ValueError("Cannot score an empty label sequence")
    return sum(p is o for p, o in zip(pseudo, oracle)) / len(pseudo)


def turn_sign_consistency(pseudo: Sequence[PrimitiveAction], oracle: Sequence[PrimitiveAction]) -> float:
    """Fraction of oracle turns decoded as the same turn."""
    turns = [(p, o) for p, o in zip(pseudo, oracle) if o is not PrimitiveAction.MOVE_FORWARD]
    if not turns:
        return 1.0
    return sum(p is o for p, o in turns) / len(turns)


def calibrate(
    video: Video,
    base: Optional[DecoderParams] = None,
    tau_x_grid: Sequence[float] = TAU_X_GRID,
    tau_y_grid: Sequence[float] = TAU_Y_GRID
) -> CalibrationResult:
    """Grid-search (tau_x, tau_y) for the best labeling accuracy on an oracle video.

    Ties go to the smaller tau_x, then the smaller tau_y.
    """
    if not video.has_oracle:
        raise ValueError(f"Video {video.id} carries no oracle actions to calibrate against")
    base = base or DecoderParams()
    means = [decoder_mean(a, b, base) for a, b in zip(video.frames[:-1], video.frames[1:])]
    grid: Dict[Tuple[float, float], float] = {}
    best_key, best_acc = None, -1.0
    for tx in sorted(tau_x_grid):
        for ty in sorted(tau_y_grid):
            predicted = [
                PrimitiveAction.MOVE_FORWARD if mean is None else classify_mean(mean[0], mean[1], tx, ty)
                for mean in means
            ]
            acc = labeling_accuracy(predicted, video.true_actions)
            grid[(tx, ty)] = acc
            if acc > best_acc:
                best_key, best_acc = (tx, ty), acc
    params = dataclasses.replace(base, tau_x=best_key[0], tau_y=best_key[1])
    return CalibrationResult(params=params, accuracy=best_acc, grid=grid)
