"""Model checkpoints: tensor file, ModelConfig sidecar and training state."""
from typing import Dict, Optional

import numpy as np

from src.domain.exceptions import ConfigMismatchError, ShapeMismatchError
from src.domain.repositories.checkpoint_repository import CheckpointRepository
from src.infrastructure.config.experiment import ModelConfig
from src.infrastructure.config.logging import logger
from src.infrastructure.vnbert import VNBert, build_model

TARGET_PREFIX = "target/"
# ModelConfig keys that only affect initialization
INIT_ONLY_KEYS = frozenset({"seed"})


def optim_path(path: str) -> str:
    return f"{path}.optim"


def save_model(repository: CheckpointRepository, path: str, model: VNBert) -> str:
    repository.save(path, model.state_dict())
    repository.save_sidecar(path, {"format_version": 1, "model": model.config.model_dump(mode="json")})
    logger.debug(f"Saved model checkpoint {path}")
    return path


def load_model(repository: CheckpointRepository, path: str, expected: Optional[ModelConfig] = None) -> VNBert:
    """Rebuild a model from its checkpoint.

    The model is built from ``expected`` when given, else from the stored
    sidecar. Tensors that do not fit raise a ShapeMismatchError listing
    them. When the shapes fit, the stored config must still agree with
    ``expected`` on every key but the init seed (ConfigMismatchError naming
    the keys otherwise).
    """
    sidecar = repository.load_sidecar(path)
    stored = ModelConfig.model_validate(sidecar["model"])
    config = expected if expected is not None else stored
    model = build_model(config)
    try:
        model.load_state_dict(repository.load(path))
    except ShapeMismatchError as exc:
        raise ShapeMismatchError(f"Checkpoint {path} does not fit the model config: {exc}") from exc
    if expected is not None:
        check_config(path, stored, expected)
    return model


def check_config(path: str, stored: ModelConfig, expected: ModelConfig):
    ours, theirs = expected.model_dump(), stored.model_dump()
    keys = sorted(k for k in ours if k not in INIT_ONLY_KEYS and ours[k] != theirs.get(k))
    if keys:
        detail = ", ".join(f"{k}: checkpoint {theirs.get(k)!r} vs config {ours[k]!r}" for k in keys)
        raise ConfigMismatchError(f"Checkpoint {path} was trained with another model config ({detail})", keys)


def save_training_state(
    repository: CheckpointRepository,
    path: str,
    optimizer_tensors: Dict[str, np.ndarray],
    target: VNBert
) -> str:
    tensors = dict(optimizer_tensors)
    for name, value in target.state_dict().items():
        tensors[TARGET_PREFIX + name] = value
    return repository.save(optim_path(path), tensors)


def load_training_state(repository: CheckpointRepository, path: str):
    """Split a training-state file into optimizer tensors and target-network tensors."""
    tensors = repository.load(optim_path(path))
    optimizer = {k: v for k, v in tensors.items() if not k.startswith(TARGET_PREFIX)}
    target = {k[len(TARGET_PREFIX):]: v for k, v in tensors.items() if k.startswith(TARGET_PREFIX)}
    return optimizer, target
