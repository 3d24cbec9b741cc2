from .scene_generation_use_case import SceneGenerationUseCase
from .collection_use_case import CollectionUseCase
from .labeling_use_case import LabelingUseCase
from .training_use_case import TrainingUseCase
from .evaluation_use_case import EvaluationUseCase
from .report_use_case import ReportUseCase
from .embedding_dump_use_case import EmbeddingDumpUseCase

__all__ = [
    "SceneGenerationUseCase",
    "CollectionUseCase",
    "LabelingUseCase",
    "TrainingUseCase",
    "EvaluationUseCase",
    "ReportUseCase",
    "EmbeddingDumpUseCase"
]
