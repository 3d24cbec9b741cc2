from enum import Enum


class PrimitiveAction(str, Enum):
    """Primitive navigation action executed by the simulator."""
    MOVE_FORWARD = "F"
    TURN_LEFT = "L"
    TURN_RIGHT = "R"
    STOP = "S"

    @property
    def token(self) -> int:
        """Index into the action embedding table."""
        return _ACTION_TOKENS[self]

    @classmethod
    def movements(cls) -> tuple:
        return (cls.MOVE_FORWARD, cls.TURN_LEFT, cls.TURN_RIGHT)


_ACTION_TOKENS = {
    PrimitiveAction.MOVE_FORWARD: 0,
    PrimitiveAction.TURN_LEFT: 1,
    PrimitiveAction.TURN_RIGHT: 2,
    PrimitiveAction.STOP: 3,
}


class Split(str, Enum):
    """Scene split label."""
    TRAIN = "train"
    UNSEEN_LAYOUT = "unseen_layout"
    UNSEEN_ROOM = "unseen_room"


class DecoderKind(str, Enum):
    """Pseudo-action decoder."""
    FLOW = "flow"
    MATCHING = "matching"


class Variant(str, Enum):
    """Evaluated agent variant."""
    FULL = "full"
    NO_CONTEXT = "no_context"
    NO_TEMPORAL = "no_temporal"
    MATCHING_DECODER = "matching_decoder"
    RANDOM = "random"

    @property
    def decoder(self) -> DecoderKind:
        if self is Variant.MATCHING_DECODER:
            return DecoderKind.MATCHING
        return DecoderKind.FLOW
