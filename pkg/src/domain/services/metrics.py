from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from src.domain.entities.episode import EpisodeRecord


@dataclass(frozen=True)
class MetricSummary:
    """Aggregated navigation metrics; SR and SPL in percent."""
    sr: float
    spl: float
    tl: float
    tl_m: float
    ne: float
    n_episodes: int


def spl_term(record: EpisodeRecord) -> float:
    if not record.success:
        return 0.0
    if record.shortest_path <= 0.0:
        return 1.0
    return record.shortest_path / max(record.path_length, record.shortest_path)


def compute_metrics(episodes: Sequence[EpisodeRecord]) -> MetricSummary:
    """SR, SPL, TL (steps and meters) and NE over a set of episodes."""
    if not episodes:
        raise ValueError("compute_metrics needs at least one episode")
    success = np.array([e.success for e in episodes], dtype=np.float64)
    spl = np.array([spl_term(e) for e in episodes], dtype=np.float64)
    return MetricSummary(
        sr=float(success.mean() * 100.0),
        spl=float(spl.mean() * 100.0),
        tl=float(np.mean([e.steps_taken for e in episodes])),
        tl_m=float(np.mean([e.path_length for e in episodes])),
        ne=float(np.mean([e.final_ne for e in episodes])),
        n_episodes=len(episodes)
    )


def mean_std(values: Iterable[float]) -> Tuple[float, float]:
    """Mean and sample standard deviation (0 for a single value)."""
    arr = np.asarray(list(values), dtype=np.float64)
    if arr.size == 0:
        raise ValueError("mean_std needs at least one value")
    std = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    return float(arr.mean()), std


def merge(summaries: List[MetricSummary]) -> MetricSummary:
    """Episode-weighted merge of summaries."""
    total = sum(s.n_episodes for s in summaries)
    if total == 0:
        raise ValueError("Cannot merge empty summaries")

    def weighted(attr):
        return sum(getattr(s, attr) * s.n_episodes for s in summaries) / total

    return MetricSummary(
        sr=weighted("sr"), spl=weighted("spl"), tl=weighted("tl"),
        tl_m=weighted("tl_m"), ne=weighted("ne"), n_episodes=total
    )
