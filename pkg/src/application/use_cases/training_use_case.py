"""
Training Use Case.
"""
from typing import List, Optional

from src.application.dtos.training_dto import LossRecord, SceneTrainingData, TrainingResultDTO
from src.application.services.checkpointing import (
    load_model, load_training_state, save_model, save_training_state
)
from src.application.services.trainer import Trainer
from src.domain.entities.enums import DecoderKind, Split, Variant
from src.domain.repositories import (
    ArtifactRepository, CheckpointRepository, GoalRepository, LabelRepository,
    ManifestRepository, VideoRepository
)
from src.infrastructure.config.experiment import AblationFlags, ExperimentConfig, dump_config
from src.infrastructure.config.logging import logger
from src.infrastructure.vnbert import build_model

LOSS_LOG_HEADER = ["step", "L_a", "L_d", "L_q", "L_t", "total", "wall_ms"]
CHECKPOINT_NAME = "model.ckpt"


def run_name(ablation: AblationFlags) -> str:
    if ablation.no_context:
        return Variant.NO_CONTEXT.value
    if ablation.no_temporal:
        return Variant.NO_TEMPORAL.value
    if ablation.matching_decoder:
        return Variant.MATCHING_DECODER.value
    return Variant.FULL.value


def run_dir(name: str, seed: int) -> str:
    return f"runs/{name}/seed_{seed}"


def _row(record: LossRecord) -> list:
    return [record.step, record.l_a, record.l_d, record.l_q, record.l_t, record.total, round(record.wall_ms, 3)]


class TrainingUseCase:
    """Use case for offline training on the labeled training split."""

    def __init__(
        self,
        manifest_repository: ManifestRepository,
        video_repository: VideoRepository,
        goal_repository: GoalRepository,
        label_repository: LabelRepository,
        checkpoint_repository: CheckpointRepository,
        artifact_repository: ArtifactRepository
    ):
        self.manifest_repository = manifest_repository
        self.video_repository = video_repository
        self.goal_repository = goal_repository
        self.label_repository = label_repository
        self.checkpoint_repository = checkpoint_repository
        self.artifact_repository = artifact_repository

    def load_scenes(self, decoder: DecoderKind, split: Split = Split.TRAIN) -> List[SceneTrainingData]:
        """Labeled trajectories and goal sets of one split; oracle data is never read."""
        manifest = self.manifest_repository.get()
        scenes = []
        for entry in manifest.scenes_in(split):
            video_id = manifest.videos.get(entry.scene_id)
            if video_id is None:
                raise ValueError(f"Scene {entry.scene_id} has no collected video; run collect first")
            if not self.label_repository.exists(video_id, decoder):
                raise ValueError(f"Missing {decoder.value} labels for video {video_id}; run label first")
            video = self.video_repository.get(video_id)
            trajectory = self.label_repository.get(video_id, decoder, video.frames, video.success_objects)
            goals = []
            for object_id in manifest.goals.get(entry.scene_id, []):
                goals.extend(self.goal_repository.get(entry.scene_id, object_id))
            scenes.append(SceneTrainingData(entry.scene_id, trajectory, goals))
        if not scenes:
            raise ValueError(f"No {split.value} scenes in the manifest")
        return scenes

    def execute(self, config: ExperimentConfig, out_dir: Optional[str] = None, resume: bool = True) -> TrainingResultDTO:
        """Train until ``config.train.total_steps``, resuming from an existing checkpoint.

        Returns:
            Checkpoint and loss-log locations plus the records of this invocation.
        """
        train_cfg = config.train
        out_dir = out_dir or run_dir(run_name(train_cfg.ablation), train_cfg.seed)
        decoder = DecoderKind.MATCHING if train_cfg.ablation.matching_decoder else DecoderKind.FLOW
        scenes = self.load_scenes(decoder)

        ckpt = self.artifact_repository.resolve(f"{out_dir}/{CHECKPOINT_NAME}")
        log_path = f"{out_dir}/loss_log.csv"
        self.artifact_repository.write_text(f"{out_dir}/effective_config.json", dump_config(config))

        resuming = resume and self.checkpoint_repository.exists(ckpt)
        if resuming:
            model = load_model(self.checkpoint_repository, ckpt, expected=config.model)
            trainer = Trainer(model, scenes, train_cfg)
            optimizer_state, target_state = load_training_state(self.checkpoint_repository, ckpt)
            trainer.load_state(optimizer_state, target_state)
            logger.info(f"Resuming {ckpt} at step {trainer.step}")
        else:
            trainer = Trainer(build_model(config.model), scenes, train_cfg)
            self.artifact_repository.append_rows(log_path, LOSS_LOG_HEADER, [], truncate=True)
            logger.info(f"Training {out_dir} on {len(scenes)} scenes for {train_cfg.total_steps} steps")

        history: List[LossRecord] = []
        pending: List[LossRecord] = []

        def checkpoint():
            self.artifact_repository.append_rows(log_path, LOSS_LOG_HEADER, [_row(r) for r in pending])
            pending.clear()
            save_model(self.checkpoint_repository, ckpt, trainer.model)
            save_training_state(self.checkpoint_repository, ckpt, trainer.optimizer_tensors(), trainer.target)
            logger.info(f"Checkpoint at step {trainer.step}: {ckpt}")

        while trainer.step < train_cfg.total_steps:
            record = trainer.train_step()
            history.append(record)
            pending.append(record)
            if record.step % train_cfg.log_interval == 0:
                logger.info(
                    f"step {record.step}: L_a={record.l_a:.4f} L_d={record.l_d:.4f} "
                    f"L_q={record.l_q:.4f} L_t={record.l_t:.4f} total={record.total:.4f}"
                )
            if record.step % train_cfg.checkpoint_interval == 0:
                checkpoint()
        if pending or not resuming:
            checkpoint()

        return TrainingResultDTO(
            checkpoint_path=ckpt,
            loss_log_path=self.artifact_repository.resolve(log_path),
            steps=trainer.step,
            final_losses=history[-1] if history else None,
            history=history
        )
