"""
Evaluation Use Case.

Runs the navigation suite for one agent variant over seeds, splits, scenes,
goal objects and repeats, and writes one result table per seed.
"""
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional

from src.application.dtos.pipeline_dto import EvaluationResultDTO, SceneResultDTO
from src.application.services.checkpointing import load_model
from src.application.services.episode_runner import ModelPolicy, RandomPolicy, run_episode
from src.application.use_cases.training_use_case import CHECKPOINT_NAME, run_dir
from src.domain.entities.enums import Split, Variant
from src.domain.entities.episode import EpisodeRecord
from src.domain.entities.video import LabeledTrajectory
from src.domain.repositories import (
    ArtifactRepository, CheckpointRepository, GoalRepository, LabelRepository,
    ManifestRepository, SceneRepository, VideoRepository
)
from src.domain.services.metrics import compute_metrics
from src.domain.services.roamer import random_start
from src.domain.services.seeding import rng_for
from src.infrastructure.config.experiment import ExperimentConfig, dump_config
from src.infrastructure.config.logging import logger
from src.infrastructure.vnbert import ContextState, VNBert

RESULT_HEADER = ["split", "scene", "variant", "seed", "SR", "SPL", "TL", "TL_m", "NE", "n_episodes"]
EPISODE_HEADER = [
    "split", "scene", "goal_object", "repeat", "success", "steps_taken",
    "path_length", "shortest_path", "final_ne", "stop_emitted"
]


class EvaluationUseCase:
    def __init__(
        self,
        manifest_repository: ManifestRepository,
        scene_repository: SceneRepository,
        video_repository: VideoRepository,
        goal_repository: GoalRepository,
        label_repository: LabelRepository,
        checkpoint_repository: CheckpointRepository,
        artifact_repository: ArtifactRepository
    ):
        self.manifest_repository = manifest_repository
        self.scene_repository = scene_repository
        self.video_repository = video_repository
        self.goal_repository = goal_repository
        self.label_repository = label_repository
        self.checkpoint_repository = checkpoint_repository
        self.artifact_repository = artifact_repository

    def checkpoint_for(self, variant: Variant, seed: int) -> str:
        """Checkpoint a variant is evaluated with.

        The context-free variant falls back to the full checkpoint when no
        dedicated run exists.
        """
        path = self.artifact_repository.resolve(f"{run_dir(variant.value, seed)}/{CHECKPOINT_NAME}")
        if variant is Variant.NO_CONTEXT and not self.checkpoint_repository.exists(path):
            path = self.artifact_repository.resolve(f"{run_dir(Variant.FULL.value, seed)}/{CHECKPOINT_NAME}")
        return path

    def _context(self, model: VNBert, variant: Variant, video_id: str) -> ContextState:
        if variant is Variant.NO_CONTEXT:
            return ModelPolicy.encode_context(model, LabeledTrajectory.empty(), empty_context=True)
        decoder = variant.decoder
        if not self.label_repository.exists(video_id, decoder):
            raise ValueError(f"Missing {decoder.value} labels for context video {video_id}")
        video = self.video_repository.get(video_id)
        trajectory = self.label_repository.get(video_id, decoder, video.frames, video.success_objects)
        return ModelPolicy.encode_context(model, trajectory)

    def execute(
        self,
        config: ExperimentConfig,
        variant: Variant,
        seeds: Optional[List[int]] = None,
        splits: Optional[List[Split]] = None,
        threads: int = 1,
        checkpoint: Optional[str] = None,
        out_dir: Optional[str] = None
    ) -> EvaluationResultDTO:
        """Evaluate ``variant`` and write ``results/<variant>/seed_<s>.csv`` per seed."""
        seeds = seeds if seeds is not None else config.suite.seeds
        splits = splits or config.suite.splits
        out_dir = out_dir or f"results/{variant.value}"
        manifest = self.manifest_repository.get()
        self.artifact_repository.write_text(f"{out_dir}/effective_config.json", dump_config(config))
        inference = config.inference
        width, height = config.model.frame_width, config.model.frame_height

        rows: List[SceneResultDTO] = []
        split_episodes: Dict[str, List[EpisodeRecord]] = {}
        paths = []
        for seed in seeds:
            model = None
            if variant is not Variant.RANDOM:
                path = checkpoint or self.checkpoint_for(variant, seed)
                model = load_model(self.checkpoint_repository, path, expected=config.model)
                logger.info(f"Evaluating {variant.value} seed {seed} with {path}")

            seed_rows, episode_rows = [], []
            for split in splits:
                for entry in manifest.scenes_in(split):
                    scene_id = entry.scene_id
                    video_id = manifest.videos.get(scene_id)
                    objects = manifest.goals.get(scene_id)
                    if video_id is None or not objects:
                        raise ValueError(f"Scene {scene_id} has no context video or goal set; run collect first")
                    maze = self.scene_repository.get(scene_id)
                    context = self._context(model, variant, video_id) if model is not None else None

                    tasks = []
                    for object_id in objects:
                        goals = self.goal_repository.get(scene_id, object_id)
                        for repeat in range(config.suite.repeats):
                            rng = rng_for(seed, inference.seed, "start", scene_id, object_id, repeat)
                            start = random_start(maze, rng)
                            goal = goals[int(rng.integers(len(goals)))]
                            tasks.append((object_id, repeat, start, goal))

                    def job(task):
                        object_id, repeat, start, goal = task
                        policy = ModelPolicy(model, context, inference) if model is not None else RandomPolicy()
                        return run_episode(
                            maze, policy, goal, start, inference,
                            rng_for(seed, inference.seed, "episode", scene_id, object_id, repeat),
                            seed=seed,
                            success_radius=config.scenes.success_radius,
                            width=width,
                            height=height
                        )

                    if threads > 1:
                        with ThreadPoolExecutor(max_workers=threads) as pool:
                            episodes = list(pool.map(job, tasks))
                    else:
                        episodes = [job(task) for task in tasks]

                    summary = compute_metrics(episodes)
                    rows.append(SceneResultDTO(split.value, scene_id, variant.value, seed, summary))
                    split_episodes.setdefault(split.value, []).extend(episodes)
                    seed_rows.append([
                        split.value, scene_id, variant.value, seed, summary.sr, summary.spl,
                        summary.tl, summary.tl_m, summary.ne, summary.n_episodes
                    ])
                    for (object_id, repeat, _, _), e in zip(tasks, episodes):
                        episode_rows.append([
                            split.value, scene_id, object_id, repeat, int(e.success), e.steps_taken,
                            e.path_length, e.shortest_path, e.final_ne, int(e.stop_emitted)
                        ])
                    logger.debug(f"{variant.value} seed {seed} {scene_id}: SR {summary.sr:.2f} SPL {summary.spl:.2f}")

            paths.append(self.artifact_repository.write_table(f"{out_dir}/seed_{seed}.csv", RESULT_HEADER, seed_rows))
            self.artifact_repository.write_table(f"{out_dir}/episodes_seed_{seed}.csv", EPISODE_HEADER, episode_rows)

        split_summaries = {split: compute_metrics(eps) for split, eps in split_episodes.items()}
        for split, summary in split_summaries.items():
            logger.info(
                f"{variant.value} {split}: SR {summary.sr:.2f} SPL {summary.spl:.2f} "
                f"TL {summary.tl:.1f} NE {summary.ne:.3f} ({summary.n_episodes} episodes)"
            )
        return EvaluationResultDTO(
            variant=variant.value,
            rows=rows,
            split_summaries=split_summaries,
            results_paths=paths
        )
