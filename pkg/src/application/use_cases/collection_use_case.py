"""
Collection Use Case.

Roams every scene once and renders the goal-image set of each object.
"""
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Tuple

from src.application.dtos.pipeline_dto import CollectionResultDTO
from src.domain.repositories import GoalRepository, ManifestRepository, SceneRepository, VideoRepository
from src.domain.services.roamer import extract_goal_images, roam
from src.domain.services.seeding import derive_seed
from src.infrastructure.config.experiment import ScenePlan
from src.infrastructure.config.logging import logger


def video_id_for(scene_id: str) -> str:
    return f"{scene_id}_v0"


class CollectionUseCase:
    def __init__(
        self,
        scene_repository: SceneRepository,
        video_repository: VideoRepository,
        goal_repository: GoalRepository,
        manifest_repository: ManifestRepository
    ):
        self.scene_repository = scene_repository
        self.video_repository = video_repository
        self.goal_repository = goal_repository
        self.manifest_repository = manifest_repository

    def _collect_scene(self, scene_id: str, plan: ScenePlan, seed: int, width: int, height: int) -> Tuple[str, str, List[str], int]:
        maze = self.scene_repository.get(scene_id)
        video = roam(
            maze,
            derive_seed(seed, "roam", scene_id),
            steps=plan.roamer_steps,
            width=width,
            height=height,
            success_radius=plan.success_radius,
            video_id=video_id_for(scene_id)
        )
        self.video_repository.save(video)
        objects, n_images = [], 0
        for obj in maze.objects:
            images = extract_goal_images(
                maze,
                obj.object_id,
                k=plan.goal_views,
                seed=derive_seed(seed, "goal", scene_id, obj.object_id),
                width=width,
                height=height,
                success_radius=plan.success_radius
            )
            self.goal_repository.save(scene_id, obj.object_id, images)
            objects.append(obj.object_id)
            n_images += len(images)
        logger.debug(f"Collected {video.id}: {len(video)} frames, {n_images} goal views")
        return scene_id, video.id, objects, n_images

    def execute(
        self,
        plan: ScenePlan,
        seed: int,
        width: int = 64,
        height: int = 64,
        threads: int = 1,
        scene_ids: Optional[List[str]] = None
    ) -> CollectionResultDTO:
        """Collect a video and goal set for every scene in the manifest (or ``scene_ids``)."""
        manifest = self.manifest_repository.get()
        wanted = scene_ids or [s.scene_id for s in manifest.scenes]
        for scene_id in wanted:
            manifest.get_scene(scene_id)

        def job(scene_id):
            return self._collect_scene(scene_id, plan, seed, width, height)

        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                collected = list(pool.map(job, wanted))
        else:
            collected = [job(scene_id) for scene_id in wanted]

        goal_images = 0
        for scene_id, video_id, objects, n_images in collected:
            manifest.videos[scene_id] = video_id
            manifest.goals[scene_id] = objects
            goal_images += n_images
        self.manifest_repository.save(manifest)
        logger.info(f"Collected {len(collected)} videos and {goal_images} goal images")
        return CollectionResultDTO(
            videos=len(collected),
            goal_sets=sum(len(c[2]) for c in collected),
            goal_images=goal_images
        )
