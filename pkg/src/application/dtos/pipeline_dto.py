from dataclasses import dataclass, field
from typing import Dict, List, Optional

from src.domain.entities.manifest import DatasetManifest
from src.domain.services.metrics import MetricSummary


@dataclass
class SceneGenerationResultDTO:
    manifest: DatasetManifest
    manifest_path: str
    scenes_by_split: Dict[str, int]


@dataclass
class CollectionResultDTO:
    videos: int
    goal_sets: int
    goal_images: int


@dataclass
class LabelAccuracyDTO:
    video_id: str
    decoder: str
    accuracy: float


@dataclass
class LabelingResultDTO:
    labeled: int
    decoder: str
    tau_x: float
    tau_y: float
    accuracies: List[LabelAccuracyDTO] = field(default_factory=list)
    calibration_accuracy: Optional[float] = None

    @property
    def mean_accuracy(self) -> Optional[float]:
        if not self.accuracies:
            return None
        return sum(a.accuracy for a in self.accuracies) / len(self.accuracies)


@dataclass
class SceneResultDTO:
    split: str
    scene_id: str
    variant: str
    seed: int
    summary: MetricSummary


@dataclass
class EvaluationResultDTO:
    variant: str
    rows: List[SceneResultDTO]
    split_summaries: Dict[str, MetricSummary]
    results_paths: List[str]


@dataclass
class ReportResultDTO:
    csv_path: str
    markdown_path: str
    rows: int
    warnings: List[str] = field(default_factory=list)


@dataclass
class EmbeddingDumpDTO:
    path: str
    rows: int
    dim: int
