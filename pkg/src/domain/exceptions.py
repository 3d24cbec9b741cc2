"""Domain errors.

All of them are ``ValueError`` subclasses so callers that only care about
"invalid input or data" can keep catching ``ValueError``.
"""


class UnreachableGoalError(ValueError):
    pass


class GoalSamplingError(ValueError):
    pass


class FormatVersionError(ValueError):
    pass


class ChecksumMismatchError(ValueError):
    pass


class CorruptFrameError(ValueError):
    def __init__(self, message: str, frame_index: int):
        super().__init__(message)
        self.frame_index = frame_index


class ManifestValidationError(ValueError):
    def __init__(self, message: str, missing_paths=()):
        super().__init__(message)
        self.missing_paths = list(missing_paths)


class CheckpointFormatError(ValueError):
    pass


class ShapeMismatchError(ValueError):
    pass


class ConfigMismatchError(ValueError):
    def __init__(self, message: str, keys=()):
        super().__init__(message)
        self.keys = list(keys)


class NonFiniteError(ValueError):
    pass


class UnsupportedOpError(ValueError):
    pass
