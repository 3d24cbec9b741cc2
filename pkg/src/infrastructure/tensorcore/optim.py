from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np

from src.domain.exceptions import NonFiniteError, ShapeMismatchError
from src.infrastructure.tensorcore.tensor import Tensor


@dataclass
class OptimizerState:
    """AdamW moments and hyperparameters."""
    lr: float = 1e-4
    betas: Tuple[float, float] = (0.9, 0.95)
    weight_decay: float = 0.1
    eps: float = 1e-8
    step: int = 0
    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)

    def to_tensors(self) -> Dict[str, np.ndarray]:
        tensors = {"adamw/step": np.array([float(self.step)])}
        for name in sorted(self.m):
            tensors[f"adamw/m/{name}"] = self.m[name]
            tensors[f"adamw/v/{name}"] = self.v[name]
        return tensors

    def load_tensors(self, tensors: Dict[str, np.ndarray]):
        self.step = int(tensors["adamw/step"][0])
        self.m = {k[len("adamw/m/"):]: v.copy() for k, v in tensors.items() if k.startswith("adamw/m/")}
        self.v = {k[len("adamw/v/"):]: v.copy() for k, v in tensors.items() if k.startswith("adamw/v/")}


def adamw_step(
    params: Dict[str, np.ndarray],
    grads: Dict[str, np.ndarray],
    state: OptimizerState
) -> OptimizerState:
    """Decoupled-weight-decay Adam update with bias correction; updates ``params`` in place."""
    for name, p in params.items():
        g = grads.get(name)
        if g is None:
            g = np.zeros_like(p)
        if g.shape != p.shape:
            raise ShapeMismatchError(f"Gradient for {name} has shape {g.shape}, parameter has {p.shape}")
        if not np.all(np.isfinite(g)):
            raise NonFiniteError(f"Non-finite gradient for parameter {name}")

    state.step += 1
    b1, b2 = state.betas
    c1 = 1.0 - b1 ** state.step
    c2 = 1.0 - b2 ** state.step
    for name, p in params.items():
        g = grads.get(name)
        if g is None:
            g = np.zeros_like(p)
        m = state.m.setdefault(name, np.zeros_like(p))
        v = state.v.setdefault(name, np.zeros_like(p))
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * g * g
        p -= state.lr * ((m / c1) / (np.sqrt(v / c2) + state.eps) + state.weight_decay * p)
    return state


class AdamW:
    """AdamW over named parameter tensors."""

    def __init__(
        self,
        named_params: List[Tuple[str, Tensor]],
        lr: float = 1e-4,
        betas: Tuple[float, float] = (0.9, 0.95),
        weight_decay: float = 0.1,
        eps: float = 1e-8
    ):
        self.named_params = list(named_params)
        self.state = OptimizerState(lr=lr, betas=tuple(betas), weight_decay=weight_decay, eps=eps)

    def zero_grad(self):
        for _, p in self.named_params:
            p.grad = None

    def step(self):
        params = {name: p.data for name, p in self.named_params}
        grads = {name: p.grad for name, p in self.named_params if p.grad is not None}
        adamw_step(params, grads, self.state)
