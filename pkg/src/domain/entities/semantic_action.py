from dataclasses import dataclass

from src.domain.entities.enums import PrimitiveAction

MAX_REPEATS = 3
N_SEMANTIC_ACTIONS = 10
STOP_INDEX = 9

_BASE_ORDER = (PrimitiveAction.MOVE_FORWARD, PrimitiveAction.TURN_LEFT, PrimitiveAction.TURN_RIGHT)


@dataclass(frozen=True)
class SemanticAction:
    """A primitive action with its duration.

    Index mapping: F1 F2 F3 L1 L2 L3 R1 R2 R3 STOP <-> 0..9.
    """
    base: PrimitiveAction
    repeats: int = 1

    def __post_init__(self):
        if self.base is PrimitiveAction.STOP:
            if self.repeats != 1:
                raise ValueError("STOP always has repeats=1")
        elif not 1 <= self.repeats <= MAX_REPEATS:
            raise ValueError(f"repeats must be in [1, {MAX_REPEATS}], got {self.repeats}")

    @property
    def index(self) -> int:
        if self.base is PrimitiveAction.STOP:
            return STOP_INDEX
        return _BASE_ORDER.index(self.base) * MAX_REPEATS + self.repeats - 1

    @property
    def is_stop(self) -> bool:
        return self.base is PrimitiveAction.STOP

    @classmethod
    def from_index(cls, index: int) -> "SemanticAction":
        if not 0 <= index < N_SEMANTIC_ACTIONS:
            raise ValueError(f"Semantic action index out of range: {index}")
        if index == STOP_INDEX:
            return cls(PrimitiveAction.STOP, 1)
        return cls(_BASE_ORDER[index // MAX_REPEATS], index % MAX_REPEATS + 1)

    @classmethod
    def stop(cls) -> "SemanticAction":
        return cls(PrimitiveAction.STOP, 1)

    def __str__(self):
        return "STOP" if self.is_stop else f"{self.base.value}{self.repeats}"
