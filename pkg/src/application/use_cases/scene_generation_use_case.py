"""
Scene Generation Use Case.
"""
from typing import Dict, List

from src.application.dtos.pipeline_dto import SceneGenerationResultDTO
from src.domain.entities.enums import Split
from src.domain.entities.manifest import DatasetManifest, SceneEntry
from src.domain.repositories import ManifestRepository, SceneRepository
from src.domain.services.maze_generator import generate_maze
from src.domain.services.seeding import derive_seed
from src.infrastructure.config.experiment import ScenePlan
from src.infrastructure.config.logging import logger


def plan_scenes(plan: ScenePlan, seed: int) -> List[SceneEntry]:
    """Scene entries of every split.

    Unseen-layout scenes reuse training topologies with fresh layout seeds;
    unseen-room scenes get fresh topologies.
    """
    entries = []
    for i in range(plan.n_train_topologies):
        topology = derive_seed(seed, "topology", i)
        for j in range(plan.layouts_per_topology):
            entries.append(SceneEntry(f"train_t{i}_l{j}", Split.TRAIN, topology, derive_seed(seed, "layout", i, j)))
    for k in range(plan.n_unseen_layout):
        topology = derive_seed(seed, "topology", k % plan.n_train_topologies)
        entries.append(SceneEntry(f"ulayout_{k}", Split.UNSEEN_LAYOUT, topology, derive_seed(seed, "unseen_layout", k)))
    for k in range(plan.n_unseen_room):
        entries.append(SceneEntry(
            f"uroom_{k}", Split.UNSEEN_ROOM,
            derive_seed(seed, "unseen_room_topology", k), derive_seed(seed, "unseen_room_layout", k)
        ))
    return entries


class SceneGenerationUseCase:
    """Use case for generating the scene set and the dataset manifest."""

    def __init__(self, scene_repository: SceneRepository, manifest_repository: ManifestRepository):
        self.scene_repository = scene_repository
        self.manifest_repository = manifest_repository

    def execute(self, plan: ScenePlan, seed: int) -> SceneGenerationResultDTO:
        entries = plan_scenes(plan, seed)
        for entry in entries:
            maze = generate_maze(
                entry.topology_seed,
                plan.maze_width,
                plan.maze_height,
                plan.n_objects,
                layout_seed=entry.layout_seed,
                maze_id=entry.scene_id,
                cell_size=plan.cell_size
            )
            self.scene_repository.save(maze)
            logger.debug(f"Generated scene {entry.scene_id} ({entry.split.value})")

        manifest = DatasetManifest(scenes=entries)
        path = self.manifest_repository.save(manifest)
        counts: Dict[str, int] = {split.value: len(manifest.scenes_in(split)) for split in Split}
        logger.info(f"Generated {len(entries)} scenes: {counts}")
        return SceneGenerationResultDTO(manifest=manifest, manifest_path=path, scenes_by_split=counts)
