from dataclasses import dataclass, field
from typing import Dict, List

from src.domain.entities.enums import Split

MANIFEST_FORMAT_VERSION = 1


@dataclass(frozen=True)
class SceneEntry:
    """One scene of the dataset: a (topology, layout) pair with its split."""
    scene_id: str
    split: Split
    topology_seed: int
    layout_seed: int


@dataclass
class DatasetManifest:
    """Index of every scene, video and goal set under a dataset root."""
    scenes: List[SceneEntry] = field(default_factory=list)
    videos: Dict[str, str] = field(default_factory=dict)
    goals: Dict[str, List[str]] = field(default_factory=dict)
    format_version: int = MANIFEST_FORMAT_VERSION

    def scenes_in(self, split: Split) -> List[SceneEntry]:
        return [scene for scene in self.scenes if scene.split == split]

    def get_scene(self, scene_id: str) -> SceneEntry:
        for scene in self.scenes:
            if scene.scene_id == scene_id:
                return scene
        raise ValueError(f"Scene '{scene_id}' is not in the manifest")

    def validate_partition(self):
        """Each scene carries exactly one split label and ids are unique."""
        ids = [scene.scene_id for scene in self.scenes]
        duplicates = sorted({i for i in ids if ids.count(i) > 1})
        if duplicates:
            raise ValueError(f"Duplicate scene ids in manifest: {duplicates}")
