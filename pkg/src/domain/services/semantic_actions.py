from typing import Sequence

from src.domain.entities.enums import PrimitiveAction
from src.domain.entities.semantic_action import MAX_REPEATS, STOP_INDEX, SemanticAction


def semantic_target(actions: Sequence[PrimitiveAction], t: int, success_now: bool = False) -> int:
    """Semantic action index for timestep ``t`` of a pseudo-action sequence.

    STOP when the frame is a success state; otherwise the action at ``t``
    with its run length capped at three.
    """
    if success_now:
        return STOP_INDEX
    if not 0 <= t < len(actions):
        raise IndexError(f"Timestep {t} out of range for {len(actions)} actions")
    base = actions[t]
    run = 1
    while run < MAX_REPEATS and t + run < len(actions) and actions[t + run] is base:
        run += 1
    return SemanticAction(base, run).index


def expand(action: SemanticAction) -> Sequence[PrimitiveAction]:
    """Primitive steps executed for a semantic action (empty for STOP)."""
    if action.is_stop:
        return ()
    return (action.base,) * action.repeats
