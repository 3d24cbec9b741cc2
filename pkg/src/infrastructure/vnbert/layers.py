from typing import List

import numpy as np

from src.domain.entities.frame import Frame
from src.domain.exceptions import ShapeMismatchError
from src.infrastructure.tensorcore import (
    LayerNorm, Linear, Module, MultiHeadAttention, SpectralLinear, Tensor, gelu, softmax
)

CONV_KERNEL = 4
CONV1_CHANNELS = 16
CONV2_CHANNELS = 32
UTILITY_TOKENS = 4


def _patchify(x: Tensor, k: int) -> Tensor:
    """(B, H, W, C) -> (B, H/k, W/k, k*k*C): a stride-k, kernel-k convolution input."""
    b, h, w, c = x.shape
    x = x.reshape(b, h // k, k, w // k, k, c)
    x = x.transpose(0, 1, 3, 2, 4, 5)
    return x.reshape(b, h // k, w // k, k * k * c)


class FrameEncoder(Module):
    """Two stride-4 convolutions and a dense projection to the visual embedding."""

    def __init__(self, frame_height: int, frame_width: int, visual_dim: int, rng: np.random.Generator):
        super().__init__()
        self.frame_height = frame_height
        self.frame_width = frame_width
        k2 = CONV_KERNEL * CONV_KERNEL
        self.conv1 = Linear(k2, CONV1_CHANNELS, rng)
        self.conv2 = Linear(k2 * CONV1_CHANNELS, CONV2_CHANNELS, rng)
        cells = (frame_height // k2) * (frame_width // k2)
        self.proj = Linear(cells * CONV2_CHANNELS, visual_dim, rng)
        self.norm = LayerNorm(visual_dim)

    def pixels(self, frames: List[Frame]) -> np.ndarray:
        for i, frame in enumerate(frames):
            if frame.pixels.shape != (self.frame_height, self.frame_width):
                raise ShapeMismatchError(
                    f"Frame {i} is {frame.pixels.shape}, model expects "
                    f"({self.frame_height}, {self.frame_width})"
                )
        return np.stack([f.pixels for f in frames]) - 0.5

    def forward(self, frames: List[Frame]) -> Tensor:
        x = Tensor(self.pixels(frames)[..., None])
        x = gelu(self.conv1(_patchify(x, CONV_KERNEL)))
        x = gelu(self.conv2(_patchify(x, CONV_KERNEL)))
        b = x.shape[0]
        return self.norm(self.proj(x.reshape(b, -1)))


class FeedForward(Module):
    def __init__(self, dim: int, rng: np.random.Generator, expansion: int = 2):
        super().__init__()
        self.fc1 = Linear(dim, dim * expansion, rng)
        self.fc2 = Linear(dim * expansion, dim, rng)

    def forward(self, x: Tensor) -> Tensor:
        return self.fc2(gelu(self.fc1(x)))


class SelfAttentionLayer(Module):
    """Post-LN transformer encoder layer."""

    def __init__(self, dim: int, n_heads: int, rng: np.random.Generator):
        super().__init__()
        self.attention = MultiHeadAttention(dim, n_heads, rng)
        self.attention_norm = LayerNorm(dim)
        self.ffn = FeedForward(dim, rng)
        self.ffn_norm = LayerNorm(dim)

    def forward(self, x: Tensor) -> Tensor:
        x = self.attention_norm(x + self.attention(x, x, x))
        return self.ffn_norm(x + self.ffn(x))


class CrossAttentionLayer(Module):
    """Query tokens attend over a full token sequence, then a feed-forward block."""

    def __init__(self, dim: int, n_heads: int, rng: np.random.Generator):
        super().__init__()
        self.attention = MultiHeadAttention(dim, n_heads, rng)
        self.attention_norm = LayerNorm(dim)
        self.ffn = FeedForward(dim, rng)
        self.ffn_norm = LayerNorm(dim)

    def forward(self, queries: Tensor, sequence: Tensor) -> Tensor:
        x = self.attention_norm(queries + self.attention(queries, sequence, sequence))
        return self.ffn_norm(x + self.ffn(x))


class Head(Module):
    def __init__(self, in_dim: int, hidden_dim: int, out_dim: int, rng: np.random.Generator):
        super().__init__()
        self.fc1 = Linear(in_dim, hidden_dim, rng)
        self.fc2 = Linear(hidden_dim, out_dim, rng)

    def forward(self, x: Tensor) -> Tensor:
        return self.fc2(gelu(self.fc1(x)))


class TemporalUtility(Module):
    """Utility score of a visual embedding.

    The embedding is split into four tokens, pooled with learned attention
    weights and scored by two spectrally normalized dense layers.
    """

    def __init__(self, visual_dim: int, rng: np.random.Generator):
        super().__init__()
        self.visual_dim = visual_dim
        token_dim = visual_dim // UTILITY_TOKENS
        self.pool_query = Linear(token_dim, 1, rng)
        self.fc1 = SpectralLinear(token_dim, visual_dim, rng)
        self.fc2 = SpectralLinear(visual_dim, 1, rng)

    def forward(self, e: Tensor) -> Tensor:
        if e.shape[-1] != self.visual_dim:
            raise ShapeMismatchError(f"Utility input has dim {e.shape[-1]}, expected {self.visual_dim}")
        lead = e.shape[:-1]
        tokens = e.reshape(tuple(lead) + (UTILITY_TOKENS, self.visual_dim // UTILITY_TOKENS))
        weights = softmax(self.pool_query(tokens).reshape(tuple(lead) + (UTILITY_TOKENS,)))
        pooled = (tokens * weights.reshape(tuple(lead) + (UTILITY_TOKENS, 1))).sum(axis=-2)
        return self.fc2(gelu(self.fc1(pooled))).reshape(tuple(lead))
