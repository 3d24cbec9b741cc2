from abc import ABC, abstractmethod
from typing import Dict

import numpy as np


class CheckpointRepository(ABC):
    """Repository interface for named-tensor checkpoints."""

    @abstractmethod
    def save(self, path: str, tensors: Dict[str, np.ndarray]) -> str:
        pass

    @abstractmethod
    def load(self, path: str) -> Dict[str, np.ndarray]:
        pass

    @abstractmethod
    def save_sidecar(self, path: str, payload: dict) -> str:
        """Write the JSON sidecar next to a checkpoint."""
        pass

    @abstractmethod
    def load_sidecar(self, path: str) -> dict:
        pass

    @abstractmethod
    def exists(self, path: str) -> bool:
        pass
