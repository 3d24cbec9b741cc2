from .training_dto import SceneTrainingData, TrainingBatch, LossRecord, TrainingResultDTO
from .pipeline_dto import (
    SceneGenerationResultDTO, CollectionResultDTO, LabelAccuracyDTO, LabelingResultDTO,
    SceneResultDTO, EvaluationResultDTO, ReportResultDTO, EmbeddingDumpDTO
)

__all__ = [
    "SceneTrainingData", "TrainingBatch", "LossRecord", "TrainingResultDTO",
    "SceneGenerationResultDTO", "CollectionResultDTO", "LabelAccuracyDTO", "LabelingResultDTO",
    "SceneResultDTO", "EvaluationResultDTO", "ReportResultDTO", "EmbeddingDumpDTO"
]
