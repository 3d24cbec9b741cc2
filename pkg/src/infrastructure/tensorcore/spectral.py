"""Spectral normalization by power iteration."""
from dataclasses import dataclass
import numpy as np

from src.infrastructure.tensorcore.nn import Linear, Module
from src.infrastructure.tensorcore.tensor import Tensor, is_grad_enabled

SIGMA_FLOOR = 1e-12
CONVERGENCE_TOL = 1e-6
MAX_CONVERGENCE_ITERS = 10_000


@dataclass
class PowerIterationState:
    """Persistent left/right singular vector estimates."""
    u: np.ndarray
    v: np.ndarray

    @classmethod
    def init(cls, rows: int, cols: int, rng: np.random.Generator) -> "PowerIterationState":
        u = rng.normal(size=rows)
        v = rng.normal(size=cols)
        return cls(u / np.linalg.norm(u), v / np.linalg.norm(v))


def _normalized(x: np.ndarray, previous: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(x)
    if norm < SIGMA_FLOOR:
        return previous
    return x / norm


def estimate_sigma(w: np.ndarray, state: PowerIterationState, n_iters: int = 1, converged: bool = False) -> float:
    """Largest singular value estimate; updates ``state`` in place."""
    sigma = float(state.u @ w @ state.v)
    iterations = MAX_CONVERGENCE_ITERS if converged else n_iters
    for _ in range(iterations):
        state.v[...] = _normalized(w.T @ state.u, state.v)
        state.u[...] = _normalized(w @ state.v, state.u)
        new_sigma = float(state.u @ w @ state.v)
        done = converged and abs(new_sigma - sigma) <= CONVERGENCE_TOL * max(abs(new_sigma), SIGMA_FLOOR)
        sigma = new_sigma
        if done:
            break
    return max(abs(sigma), SIGMA_FLOOR)


def spectral_normalize(
    weight: Tensor,
    state: PowerIterationState,
    n_iters: int = 1,
    converged: bool = False
) -> Tensor:
    """Return weight / sigma_max; sigma is a constant for the backward pass."""
    if weight.ndim != 2:
        raise ValueError(f"spectral_normalize needs a matrix, got shape {weight.shape}")
    sigma = estimate_sigma(weight.data, state, n_iters, converged)
    return weight * (1.0 / sigma)


class SpectralLinear(Module):
    """Linear layer whose weight is spectrally normalized on every forward."""

    def __init__(self, in_features: int, out_features: int, rng: np.random.Generator, n_iters: int = 1):
        super().__init__()
        self.linear = Linear(in_features, out_features, rng)
        self.n_iters = n_iters
        state = PowerIterationState.init(in_features, out_features, rng)
        self.register_buffer("u", state.u)
        self.register_buffer("v", state.v)

    @property
    def power_state(self) -> PowerIterationState:
        return PowerIterationState(self._buffers["u"], self._buffers["v"])

    def forward(self, x: Tensor) -> Tensor:
        # power iteration only advances while training
        iters = self.n_iters if is_grad_enabled() else 0
        w = spectral_normalize(self.linear.weight, self.power_state, iters)
        return x @ w + self.linear.bias
