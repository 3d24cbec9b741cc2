"""Define-by-run reverse-mode autodiff over float64 numpy arrays.

Every op records its parents and a closure mapping the upstream gradient to
one gradient per parent. ``backward`` walks the recorded graph in reverse
topological order.
"""
import threading
from contextlib import contextmanager
from typing import Callable, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.domain.exceptions import UnsupportedOpError

ArrayLike = Union[np.ndarray, float, int, Sequence]

SUPPORTED_OPS = frozenset({
    "add", "sub", "mul", "div", "neg", "pow", "matmul",
    "gelu", "sigmoid", "softplus", "log", "exp", "tanh",
    "softmax", "log_softmax", "layer_norm", "embedding",
    "concat", "getitem", "reshape", "transpose", "broadcast_to",
    "sum", "mean",
})

_state = threading.local()


def is_grad_enabled() -> bool:
    return getattr(_state, "grad_enabled", True)


@contextmanager
def no_grad():
    """Disable graph recording for the current thread."""
    previous = is_grad_enabled()
    _state.grad_enabled = False
    try:
        yield
    finally:
        _state.grad_enabled = previous


def unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    """Sum a broadcast gradient back down to ``shape``."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


class Tensor:
    def __init__(self, data: ArrayLike, requires_grad: bool = False, name: Optional[str] = None):
        self.data = np.array(data, dtype=np.float64)
        self.requires_grad = requires_grad
        self.grad: Optional[np.ndarray] = None
        self.name = name
        self._op = "leaf"
        self._parents: Tuple["Tensor", ...] = ()
        self._backward: Optional[Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]] = None

    # -- graph plumbing ---------------------------------------------------

    @classmethod
    def _from_op(cls, data: np.ndarray, parents: Sequence["Tensor"], op: str, backward) -> "Tensor":
        out = cls(data)
        if is_grad_enabled() and any(p.requires_grad for p in parents):
            out.requires_grad = True
            out._op = op
            out._parents = tuple(parents)
            out._backward = backward
        return out

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    def item(self) -> float:
        if self.data.size != 1:
            raise ValueError(f"item() needs a single-element tensor, got shape {self.shape}")
        return float(self.data.reshape(-1)[0])

    def numpy(self) -> np.ndarray:
        return self.data

    def detach(self) -> "Tensor":
        return Tensor(self.data.copy())

    def zero_grad(self):
        self.grad = None

    def __repr__(self):
        return f"Tensor(shape={self.shape}, op={self._op}, requires_grad={self.requires_grad})"

    def backward(self):
        backward(self)

    # -- elementwise ------------------------------------------------------

    def __add__(self, other):
        other = as_tensor(other)
        a_shape, b_shape = self.shape, other.shape
        return Tensor._from_op(
            self.data + other.data, (self, other), "add",
            lambda g: (unbroadcast(g, a_shape), unbroadcast(g, b_shape))
        )

    __radd__ = __add__

    def __sub__(self, other):
        other = as_tensor(other)
        a_shape, b_shape = self.shape, other.shape
        return Tensor._from_op(
            self.data - other.data, (self, other), "sub",
            lambda g: (unbroadcast(g, a_shape), unbroadcast(-g, b_shape))
        )

    def __rsub__(self, other):
        return as_tensor(other) - self

    def __mul__(self, other):
        other = as_tensor(other)
        a, b = self.data, other.data
        return Tensor._from_op(
            a * b, (self, other), "mul",
            lambda g: (unbroadcast(g * b, a.shape), unbroadcast(g * a, b.shape))
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = as_tensor(other)
        a, b = self.data, other.data
        return Tensor._from_op(
            a / b, (self, other), "div",
            lambda g: (unbroadcast(g / b, a.shape), unbroadcast(-g * a / (b * b), b.shape))
        )

    def __rtruediv__(self, other):
        return as_tensor(other) / self

    def __neg__(self):
        return Tensor._from_op(-self.data, (self,), "neg", lambda g: (-g,))

    def __pow__(self, exponent: float):
        if isinstance(exponent, Tensor):
            raise UnsupportedOpError("Tensor exponents are not supported")
        a = self.data
        return Tensor._from_op(
            a ** exponent, (self,), "pow",
            lambda g: (g * exponent * a ** (exponent - 1),)
        )

    def __matmul__(self, other):
        return matmul(self, other)

    def __getitem__(self, index):
        shape = self.shape

        def _backward(g):
            grad = np.zeros(shape, dtype=np.float64)
            np.add.at(grad, index, g)
            return (grad,)

        return Tensor._from_op(self.data[index], (self,), "getitem", _backward)

    # -- shape ------------------------------------------------------------

    def reshape(self, *shape) -> "Tensor":
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        original = self.shape
        return Tensor._from_op(self.data.reshape(shape), (self,), "reshape", lambda g: (g.reshape(original),))

    def transpose(self, *axes) -> "Tensor":
        if len(axes) == 1 and isinstance(axes[0], (tuple, list)):
            axes = tuple(axes[0])
        if not axes:
            axes = tuple(reversed(range(self.ndim)))
        inverse = tuple(np.argsort(axes))
        return Tensor._from_op(self.data.transpose(axes), (self,), "transpose", lambda g: (g.transpose(inverse),))

    def swap_last(self) -> "Tensor":
        axes = list(range(self.ndim))
        axes[-1], axes[-2] = axes[-2], axes[-1]
        return self.transpose(axes)

    def broadcast_to(self, shape: Tuple[int, ...]) -> "Tensor":
        original = self.shape
        return Tensor._from_op(
            np.broadcast_to(self.data, shape).copy(), (self,), "broadcast_to",
            lambda g: (unbroadcast(g, original),)
        )

    # -- reductions -------------------------------------------------------

    def sum(self, axis=None, keepdims: bool = False) -> "Tensor":
        shape = self.shape

        def _backward(g):
            if axis is not None and not keepdims:
                g = np.expand_dims(g, axis)
            return (np.broadcast_to(g, shape).copy(),)

        return Tensor._from_op(self.data.sum(axis=axis, keepdims=keepdims), (self,), "sum", _backward)

    def mean(self, axis=None, keepdims: bool = False) -> "Tensor":
        shape = self.shape
        count = self.data.size if axis is None else int(np.prod([shape[a] for a in np.atleast_1d(axis)]))

        def _backward(g):
            if axis is not None and not keepdims:
                g = np.expand_dims(g, axis)
            return (np.broadcast_to(g, shape) / count,)

        return Tensor._from_op(self.data.mean(axis=axis, keepdims=keepdims), (self,), "mean", _backward)

    # -- activations ------------------------------------------------------

    def gelu(self) -> "Tensor":
        return gelu(self)

    def sigmoid(self) -> "Tensor":
        return sigmoid(self)

    def log(self) -> "Tensor":
        return log(self)


def as_tensor(value) -> Tensor:
    return value if isinstance(value, Tensor) else Tensor(value)


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """Batched matrix product over the last two axes."""
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim < 2 or b.ndim < 2:
        raise ValueError(f"matmul needs operands of rank >= 2, got {a.shape} and {b.shape}")
    x, y = a.data, b.data

    def _backward(g):
        ga = g @ np.swapaxes(y, -1, -2)
        gb = np.swapaxes(x, -1, -2) @ g
        return unbroadcast(ga, x.shape), unbroadcast(gb, y.shape)

    return Tensor._from_op(x @ y, (a, b), "matmul", _backward)


_GELU_C = np.sqrt(2.0 / np.pi)


def gelu(x: Tensor) -> Tensor:
    """Tanh approximation of GELU."""
    a = x.data
    inner = _GELU_C * (a + 0.044715 * a ** 3)
    t = np.tanh(inner)

    def _backward(g):
        d_inner = _GELU_C * (1.0 + 3 * 0.044715 * a ** 2)
        return (g * (0.5 * (1.0 + t) + 0.5 * a * (1.0 - t * t) * d_inner),)

    return Tensor._from_op(0.5 * a * (1.0 + t), (x,), "gelu", _backward)


def _stable_sigmoid(a: np.ndarray) -> np.ndarray:
    out = np.empty_like(a)
    pos = a >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-a[pos]))
    e = np.exp(a[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def sigmoid(x: Tensor) -> Tensor:
    s = _stable_sigmoid(x.data)
    return Tensor._from_op(s, (x,), "sigmoid", lambda g: (g * s * (1.0 - s),))


def softplus(x: Tensor) -> Tensor:
    """log(1 + e^x), computed stably."""
    a = x.data
    return Tensor._from_op(np.logaddexp(0.0, a), (x,), "softplus", lambda g: (g * _stable_sigmoid(a),))


def log(x: Tensor) -> Tensor:
    a = x.data
    return Tensor._from_op(np.log(a), (x,), "log", lambda g: (g / a,))


def exp(x: Tensor) -> Tensor:
    e = np.exp(x.data)
    return Tensor._from_op(e, (x,), "exp", lambda g: (g * e,))


def tanh(x: Tensor) -> Tensor:
    t = np.tanh(x.data)
    return Tensor._from_op(t, (x,), "tanh", lambda g: (g * (1.0 - t * t),))


def softmax(x: Tensor) -> Tensor:
    """Softmax over the last axis."""
    shifted = x.data - x.data.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    s = e / e.sum(axis=-1, keepdims=True)

    def _backward(g):
        return (s * (g - (g * s).sum(axis=-1, keepdims=True)),)

    return Tensor._from_op(s, (x,), "softmax", _backward)


def log_softmax(x: Tensor) -> Tensor:
    shifted = x.data - x.data.max(axis=-1, keepdims=True)
    lse = np.log(np.exp(shifted).sum(axis=-1, keepdims=True))
    out = shifted - lse
    s = np.exp(out)

    def _backward(g):
        return (g - s * g.sum(axis=-1, keepdims=True),)

    return Tensor._from_op(out, (x,), "log_softmax", _backward)


def layer_norm(x: Tensor, eps: float = 1e-5) -> Tensor:
    """Normalize the last axis to zero mean and unit variance (no affine)."""
    a = x.data
    mu = a.mean(axis=-1, keepdims=True)
    centered = a - mu
    var = (centered ** 2).mean(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    xhat = centered * inv

    def _backward(g):
        n = a.shape[-1]
        return (inv / n * (n * g - g.sum(axis=-1, keepdims=True) - xhat * (g * xhat).sum(axis=-1, keepdims=True)),)

    return Tensor._from_op(xhat, (x,), "layer_norm", _backward)


def embedding(weight: Tensor, indices: ArrayLike) -> Tensor:
    """Row lookup ``weight[indices]``."""
    idx = np.asarray(indices, dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= weight.shape[0]):
        raise IndexError(f"Embedding index out of range for table of {weight.shape[0]} rows")
    shape = weight.shape

    def _backward(g):
        grad = np.zeros(shape, dtype=np.float64)
        np.add.at(grad, idx, g)
        return (grad,)

    return Tensor._from_op(weight.data[idx], (weight,), "embedding", _backward)


def concat(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    tensors = [as_tensor(t) for t in tensors]
    sizes = [t.shape[axis] for t in tensors]
    splits = np.cumsum(sizes)[:-1]

    def _backward(g):
        return tuple(np.split(g, splits, axis=axis))

    return Tensor._from_op(np.concatenate([t.data for t in tensors], axis=axis), tensors, "concat", _backward)


def stack(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    expanded = []
    for t in tensors:
        shape = list(t.shape)
        shape.insert(axis if axis >= 0 else len(shape) + axis + 1, 1)
        expanded.append(t.reshape(tuple(shape)))
    return concat(expanded, axis=axis)


def _topological_order(root: Tensor) -> List[Tensor]:
    order: List[Tensor] = []
    visited = set()
    stack_: List[Tuple[Tensor, bool]] = [(root, False)]
    while stack_:
        node, expanded = stack_.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack_.append((node, True))
        for parent in node._parents:
            if id(parent) not in visited:
                stack_.append((parent, False))
    return order


def backward(loss: Tensor):
    """Accumulate d(loss)/d(leaf) into ``.grad`` of every requires_grad leaf."""
    if loss.data.size != 1:
        raise ValueError(f"backward needs a scalar loss, got shape {loss.shape}")
    if not loss.requires_grad:
        return
    order = _topological_order(loss)
    for node in order:
        if node._backward is not None and node._op not in SUPPORTED_OPS:
            raise UnsupportedOpError(f"Unsupported op '{node._op}' in graph")

    grads = {id(loss): np.ones_like(loss.data)}
    for node in reversed(order):
        g = grads.pop(id(node), None)
        if g is None:
            continue
        if node._backward is None:
            if node.requires_grad:
                node.grad = g.copy() if node.grad is None else node.grad + g
            continue
        for parent, pg in zip(node._parents, node._backward(g)):
            if pg is None or not parent.requires_grad:
                continue
            pg = np.asarray(pg, dtype=np.float64)
            key = id(parent)
            grads[key] = pg if key not in grads else grads[key] + pg


def zeros(shape, requires_grad: bool = False) -> Tensor:
    return Tensor(np.zeros(shape), requires_grad=requires_grad)


def parameters_of(tensors: Iterable[Tensor]) -> List[Tensor]:
    return [t for t in tensors if t.requires_grad]
