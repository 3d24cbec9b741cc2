from abc import ABC, abstractmethod

from src.domain.entities.manifest import DatasetManifest


class ManifestRepository(ABC):
    """Repository interface for the dataset manifest."""

    @abstractmethod
    def save(self, manifest: DatasetManifest) -> str:
        pass

    @abstractmethod
    def get(self) -> DatasetManifest:
        pass

    @abstractmethod
    def validate(self, manifest: DatasetManifest):
        """Raise ManifestValidationError listing every missing file."""
        pass
