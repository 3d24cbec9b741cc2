"""Training objectives: policy cross-entropy, termination BCE, BCQ and temporal coherence."""
from dataclasses import dataclass
from typing import Dict

import numpy as np

from src.domain.exceptions import NonFiniteError
from src.infrastructure.tensorcore import Tensor, log_softmax, softplus


def softmax_np(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def beta_mask(probs: np.ndarray, beta: float) -> np.ndarray:
    """Batch-constrained action set: probability ratio to the best action above beta."""
    ratio = probs / probs.max(axis=-1, keepdims=True)
    return ratio > beta


@dataclass
class BCQTargets:
    targets: np.ndarray
    mask: np.ndarray
    bootstrap_actions: np.ndarray


def bcq_targets(
    next_policy_logits: np.ndarray,
    next_q_target: np.ndarray,
    rewards: np.ndarray,
    terminal: np.ndarray,
    gamma: float,
    beta: float
) -> BCQTargets:
    """y = r + gamma * max over the beta-mask of target Q; y = r on terminal samples."""
    mask = beta_mask(softmax_np(next_policy_logits), beta)
    assert mask.any(axis=-1).all(), "empty batch-constrained action set"
    masked_q = np.where(mask, next_q_target, -np.inf)
    chosen = masked_q.argmax(axis=-1)
    best = masked_q[np.arange(len(chosen)), chosen]
    assert mask[np.arange(len(chosen)), chosen].all()
    targets = rewards + gamma * np.where(terminal, 0.0, best)
    return BCQTargets(targets=targets.astype(np.float64), mask=mask, bootstrap_actions=chosen)


def bcq_loss(q_values: Tensor, actions: np.ndarray, bcq: BCQTargets) -> Tensor:
    """Mean squared TD error at the sampled semantic actions; targets carry no gradient."""
    b = q_values.shape[0]
    chosen = q_values[np.arange(b), np.asarray(actions)]
    diff = chosen - Tensor(bcq.targets)
    return (diff * diff).mean()


def cross_entropy(logits: Tensor, targets: np.ndarray) -> Tensor:
    b = logits.shape[0]
    return -log_softmax(logits)[np.arange(b), np.asarray(targets)].mean()


def bce_with_logits(logits: Tensor, labels: np.ndarray) -> Tensor:
    """mean(softplus(x) - y x)."""
    return (softplus(logits) - logits * Tensor(np.asarray(labels, dtype=np.float64))).mean()


def temporal_loss(utilities: Tensor, earlier: np.ndarray, later: np.ndarray) -> Tensor:
    """Pairwise logistic preference loss ranking later frames above earlier ones."""
    diff = utilities[np.asarray(later)] - utilities[np.asarray(earlier)]
    return softplus(-diff).mean()


def order_accuracy(scores: np.ndarray, earlier: np.ndarray, later: np.ndarray) -> float:
    return float(np.mean(scores[later] > scores[earlier]))


def check_finite(terms: Dict[str, Tensor]):
    for name, value in terms.items():
        if not np.all(np.isfinite(value.data)):
            raise NonFiniteError(f"Loss term {name} is not finite")
