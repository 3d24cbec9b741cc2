import numpy as np


class Frame:
    """Egocentric grayscale image.

    Pixels are stored row-major as float64 intensities in [0, 1] and are
    always 8-bit quantized (k / 255), so a frame survives PGM storage
    bit-identically.
    """

    __slots__ = ("pixels",)

    def __init__(self, pixels: np.ndarray):
        pixels = np.asarray(pixels, dtype=np.float64)
        if pixels.ndim != 2:
            raise ValueError(f"Frame pixels must be 2-D, got shape {pixels.shape}")
        if pixels.size and (pixels.min() < 0.0 or pixels.max() > 1.0):
            raise ValueError("Frame intensities must lie in [0, 1]")
        pixels = pixels.copy()
        pixels.flags.writeable = False
        self.pixels = pixels

    @classmethod
    def from_intensities(cls, values: np.ndarray) -> "Frame":
        """Clip and quantize raw intensities to the 8-bit grid."""
        return cls.from_bytes(np.round(np.clip(values, 0.0, 1.0) * 255.0).astype(np.uint8))

    @classmethod
    def from_bytes(cls, levels: np.ndarray) -> "Frame":
        return cls(np.asarray(levels, dtype=np.uint8).astype(np.float64) / 255.0)

    def to_bytes(self) -> np.ndarray:
        return np.round(self.pixels * 255.0).astype(np.uint8)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def channels(self) -> int:
        return 1

    def __eq__(self, other):
        if not isinstance(other, Frame):
            return False
        return np.array_equal(self.pixels, other.pixels)

    def __hash__(self):
        return hash(self.pixels.tobytes())

    def __repr__(self):
        return f"Frame({self.width}x{self.height})"
