"""Layers built on the tensor engine.

Modules register parameters (trainable tensors) and buffers (plain arrays
such as power-iteration vectors) by attribute; names are dotted paths.
"""
import math
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

from src.domain.exceptions import ShapeMismatchError
from src.infrastructure.tensorcore.tensor import (
    Tensor, embedding, layer_norm, softmax
)


def parameter(data: np.ndarray) -> Tensor:
    return Tensor(data, requires_grad=True)


class Module:
    def __init__(self):
        self._buffers: Dict[str, np.ndarray] = {}

    def register_buffer(self, name: str, value: np.ndarray):
        self._buffers[name] = np.array(value, dtype=np.float64)

    def named_parameters(self, prefix: str = "") -> Iterator[Tuple[str, Tensor]]:
        for name, value in vars(self).items():
            if name.startswith("_"):
                continue
            path = f"{prefix}{name}"
            if isinstance(value, Tensor) and value.requires_grad:
                yield path, value
            elif isinstance(value, Module):
                yield from value.named_parameters(f"{path}.")
            elif isinstance(value, (list, tuple)):
                for i, item in enumerate(value):
                    if isinstance(item, Module):
                        yield from item.named_parameters(f"{path}.{i}.")

    def named_buffers(self, prefix: str = "") -> Iterator[Tuple[str, np.ndarray]]:
        for name, value in self._buffers.items():
            yield f"{prefix}{name}", value
        for name, value in vars(self).items():
            if name.startswith("_"):
                continue
            path = f"{prefix}{name}"
            if isinstance(value, Module):
                yield from value.named_buffers(f"{path}.")
            elif isinstance(value, (list, tuple)):
                for i, item in enumerate(value):
                    if isinstance(item, Module):
                        yield from item.named_buffers(f"{path}.{i}.")

    def parameters(self) -> List[Tensor]:
        return [p for _, p in self.named_parameters()]

    def zero_grad(self):
        for p in self.parameters():
            p.grad = None

    def state_dict(self) -> Dict[str, np.ndarray]:
        state = {name: p.data.copy() for name, p in self.named_parameters()}
        state.update({name: b.copy() for name, b in self.named_buffers()})
        return state

    def load_state_dict(self, state: Dict[str, np.ndarray]):
        """Copy arrays into parameters and buffers; every name and shape must match."""
        params = dict(self.named_parameters())
        buffers = dict(self.named_buffers())
        expected = {name: p.shape for name, p in params.items()}
        expected.update({name: b.shape for name, b in buffers.items()})
        missing = sorted(set(expected) - set(state))
        unexpected = sorted(set(state) - set(expected))
        mismatched = sorted(
            f"{name} {tuple(state[name].shape)} != {expected[name]}"
            for name in set(expected) & set(state)
            if tuple(state[name].shape) != tuple(expected[name])
        )
        if missing or unexpected or mismatched:
            parts = []
            if missing:
                parts.append(f"missing: {missing}")
            if unexpected:
                parts.append(f"unexpected: {unexpected}")
            if mismatched:
                parts.append(f"shape mismatch: {mismatched}")
            raise ShapeMismatchError("State does not match model: " + "; ".join(parts))
        for name, p in params.items():
            p.data = np.array(state[name], dtype=np.float64)
        for name, b in buffers.items():
            b[...] = state[name]

    def __call__(self, *args, **kwargs):
        return self.forward(*args, **kwargs)


class Linear(Module):
    """y = x W + b with W stored as (in_features, out_features)."""

    def __init__(self, in_features: int, out_features: int, rng: np.random.Generator, bias: bool = True):
        super().__init__()
        bound = 1.0 / math.sqrt(in_features)
        self.weight = parameter(rng.uniform(-bound, bound, size=(in_features, out_features)))
        self.bias = parameter(np.zeros(out_features)) if bias else None

    def forward(self, x: Tensor) -> Tensor:
        out = x @ self.weight
        return out + self.bias if self.bias is not None else out


class LayerNorm(Module):
    def __init__(self, dim: int, eps: float = 1e-5):
        super().__init__()
        self.eps = eps
        self.gamma = parameter(np.ones(dim))
        self.beta = parameter(np.zeros(dim))

    def forward(self, x: Tensor) -> Tensor:
        return layer_norm(x, self.eps) * self.gamma + self.beta


class Embedding(Module):
    def __init__(self, num_embeddings: int, dim: int, rng: np.random.Generator, scale: float = 0.02):
        super().__init__()
        self.weight = parameter(rng.normal(0.0, scale, size=(num_embeddings, dim)))

    def forward(self, indices) -> Tensor:
        return embedding(self.weight, indices)


def scaled_dot_product_attention(q: Tensor, k: Tensor, v: Tensor) -> Tensor:
    """softmax(q k^T / sqrt(d)) v over the last two axes."""
    scale = 1.0 / math.sqrt(q.shape[-1])
    weights = softmax((q @ k.swap_last()) * scale)
    return weights @ v


def _split_heads(x: Tensor, n_heads: int) -> Tensor:
    *lead, n, d = x.shape
    x = x.reshape(tuple(lead) + (n, n_heads, d // n_heads))
    axes = list(range(len(lead))) + [len(lead) + 1, len(lead), len(lead) + 2]
    return x.transpose(axes)


def _merge_heads(x: Tensor) -> Tensor:
    *lead, h, n, dh = x.shape
    axes = list(range(len(lead))) + [len(lead) + 1, len(lead), len(lead) + 2]
    return x.transpose(axes).reshape(tuple(lead) + (n, h * dh))


class MultiHeadAttention(Module):
    """Multi-head attention over (..., n, d) token sequences.

    No positional information is added here; callers add position embeddings.
    """

    def __init__(self, dim: int, n_heads: int, rng: np.random.Generator):
        super().__init__()
        if dim % n_heads != 0:
            raise ValueError(f"Model dim {dim} is not divisible by n_heads={n_heads}")
        self.dim = dim
        self.n_heads = n_heads
        self.q_proj = Linear(dim, dim, rng)
        self.k_proj = Linear(dim, dim, rng)
        self.v_proj = Linear(dim, dim, rng)
        self.out_proj = Linear(dim, dim, rng)

    def forward(self, queries: Tensor, keys: Tensor, values: Optional[Tensor] = None) -> Tensor:
        values = keys if values is None else values
        for label, t in (("queries", queries), ("keys", keys), ("values", values)):
            if t.shape[-1] != self.dim:
                raise ShapeMismatchError(f"Attention {label} have dim {t.shape[-1]}, expected {self.dim}")
        if keys.shape[:-1] != values.shape[:-1]:
            raise ShapeMismatchError(f"Keys {keys.shape} and values {values.shape} disagree")
        q = _split_heads(self.q_proj(queries), self.n_heads)
        k = _split_heads(self.k_proj(keys), self.n_heads)
        v = _split_heads(self.v_proj(values), self.n_heads)
        return self.out_proj(_merge_heads(scaled_dot_product_attention(q, k, v)))


def multi_head_attention(
    queries: Tensor,
    keys: Tensor,
    values: Tensor,
    n_heads: int,
    projections: MultiHeadAttention
) -> Tensor:
    if projections.n_heads != n_heads:
        raise ShapeMismatchError(f"Projections were built for {projections.n_heads} heads, not {n_heads}")
    return projections(queries, keys, values)
