from dataclasses import dataclass


@dataclass(frozen=True)
class EpisodeRecord:
    """Outcome of one navigation episode."""
    scene_id: str
    goal_object: str
    success: bool
    steps_taken: int
    path_length: float
    shortest_path: float
    final_ne: float
    stop_emitted: bool
    seed: int

    def __post_init__(self):
        if self.steps_taken < 0 or self.path_length < 0 or self.final_ne < 0:
            raise ValueError("Episode counters must be non-negative")
