"""
Labeling Use Case.
"""
from typing import List, Optional, Tuple

from src.application.dtos.pipeline_dto import LabelAccuracyDTO, LabelingResultDTO
from src.domain.entities.enums import DecoderKind
from src.domain.entities.flow import DecoderParams
from src.domain.repositories import ArtifactRepository, LabelRepository, ManifestRepository, VideoRepository
from src.domain.services.action_decoder import calibrate, label_video, labeling_accuracy
from src.domain.services.maze_generator import generate_maze
from src.domain.services.roamer import roam
from src.domain.services.seeding import derive_seed
from src.infrastructure.config.experiment import ScenePlan
from src.infrastructure.config.logging import logger

ACCURACY_TABLE = "label_accuracy.csv"


class LabelingUseCase:
    """Use case for decoding pseudo-actions for every collected video."""

    def __init__(
        self,
        manifest_repository: ManifestRepository,
        video_repository: VideoRepository,
        label_repository: LabelRepository,
        artifact_repository: ArtifactRepository
    ):
        self.manifest_repository = manifest_repository
        self.video_repository = video_repository
        self.label_repository = label_repository
        self.artifact_repository = artifact_repository

    def calibrate_thresholds(
        self,
        params: DecoderParams,
        plan: ScenePlan,
        seed: int,
        width: int = 64,
        height: int = 64
    ) -> Tuple[DecoderParams, float]:
        """Fit (tau_x, tau_y) on a freshly roamed maze that belongs to no split."""
        maze = generate_maze(
            derive_seed(seed, "calibration"),
            plan.maze_width,
            plan.maze_height,
            plan.n_objects,
            maze_id="calibration",
            cell_size=plan.cell_size
        )
        video = roam(maze, derive_seed(seed, "calibration_roam"), plan.roamer_steps, width, height, plan.success_radius)
        result = calibrate(video, params)
        logger.info(
            f"Calibrated tau_x={result.params.tau_x} tau_y={result.params.tau_y} "
            f"(accuracy {result.accuracy:.4f})"
        )
        return result.params, result.accuracy

    def execute(
        self,
        params: DecoderParams,
        threads: int = 1,
        calibration: Optional[dict] = None,
        scene_ids: Optional[List[str]] = None
    ) -> LabelingResultDTO:
        """Label every video in the manifest.

        Args:
            params: Decoder parameters; ``params.kind`` selects the decoder.
            threads: Frame-pair workers per video.
            calibration: Keyword arguments for ``calibrate_thresholds``; when
                given, the fitted thresholds replace ``params``'.
            scene_ids: Restrict labeling to these scenes.

        Returns:
            Label counts and per-video accuracy where oracle actions exist.
        """
        calibration_accuracy = None
        if calibration is not None:
            params, calibration_accuracy = self.calibrate_thresholds(params, **calibration)

        manifest = self.manifest_repository.get()
        videos = sorted(manifest.videos.items())
        if scene_ids:
            videos = [(s, v) for s, v in videos if s in set(scene_ids)]
        if not videos:
            raise ValueError("No collected videos in the manifest; run collect first")

        accuracies: List[LabelAccuracyDTO] = []
        for scene_id, video_id in videos:
            video = self.video_repository.get(video_id, include_oracle=True)
            trajectory = label_video(video, params, workers=threads)
            self.label_repository.save(trajectory)
            if video.has_oracle:
                acc = labeling_accuracy(trajectory.pseudo_actions, video.true_actions)
                accuracies.append(LabelAccuracyDTO(video_id, params.kind.value, acc))
                logger.info(f"Labeled {video_id} with {params.kind.value} decoder: accuracy {acc:.4f}")
            else:
                logger.info(f"Labeled {video_id} with {params.kind.value} decoder")

        if accuracies:
            self._write_accuracy_table(params.kind, accuracies)
        return LabelingResultDTO(
            labeled=len(videos),
            decoder=params.kind.value,
            tau_x=params.tau_x,
            tau_y=params.tau_y,
            accuracies=accuracies,
            calibration_accuracy=calibration_accuracy
        )

    def _write_accuracy_table(self, kind: DecoderKind, accuracies: List[LabelAccuracyDTO]):
        """Merge with rows of the other decoder so both runs share one table."""
        rows = []
        if self.artifact_repository.list(ACCURACY_TABLE):
            rows = [
                (r["video_id"], r["decoder"], float(r["accuracy"]))
                for r in self.artifact_repository.read_table(ACCURACY_TABLE)
                if r["decoder"] != kind.value
            ]
        rows.extend((a.video_id, a.decoder, a.accuracy) for a in accuracies)
        rows.sort(key=lambda r: (r[1], r[0]))
        self.artifact_repository.write_table(ACCURACY_TABLE, ["video_id", "decoder", "accuracy"], rows)
