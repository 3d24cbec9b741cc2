"""Decision rule at inference time."""
import numpy as np

from src.application.services.losses import beta_mask, softmax_np
from src.domain.entities.semantic_action import SemanticAction
from src.infrastructure.config.experiment import InferenceConfig


def stop_probability(term_logit: float) -> float:
    if term_logit >= 0:
        return float(1.0 / (1.0 + np.exp(-term_logit)))
    z = np.exp(term_logit)
    return float(z / (1.0 + z))


def select_action(
    policy_logits: np.ndarray,
    q_values: np.ndarray,
    term_logit: float,
    config: InferenceConfig,
    rng: np.random.Generator
) -> SemanticAction:
    """STOP on a confident termination signal, else epsilon-greedy Q over the beta-mask.

    With probability ``epsilon`` the masked argmax of Q is taken (ties go to
    the lowest index); otherwise an action is drawn uniformly from the mask.
    """
    if stop_probability(term_logit) > config.stop_threshold:
        return SemanticAction.stop()
    mask = beta_mask(softmax_np(np.asarray(policy_logits, dtype=np.float64)), config.beta)
    allowed = np.flatnonzero(mask)
    if rng.random() < config.epsilon:
        masked_q = np.where(mask, q_values, -np.inf)
        return SemanticAction.from_index(int(np.argmax(masked_q)))
    return SemanticAction.from_index(int(allowed[rng.integers(len(allowed))]))
