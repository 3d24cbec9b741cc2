from src.domain.entities.enums import Split
from src.domain.entities.manifest import MANIFEST_FORMAT_VERSION, DatasetManifest, SceneEntry
from src.domain.exceptions import ManifestValidationError
from src.domain.repositories.manifest_repository import ManifestRepository
from src.infrastructure.persistence.files import DatasetLayout, atomic_write_json, check_version, read_json


class FileManifestRepository(ManifestRepository):
    """Single ``manifest.json`` at the dataset root."""

    def __init__(self, root: str):
        self.layout = DatasetLayout(root)

    def _to_item(self, manifest: DatasetManifest) -> dict:
        return {
            "format_version": manifest.format_version,
            "scenes": [
                {
                    "scene_id": s.scene_id,
                    "split": s.split.value,
                    "topology_seed": s.topology_seed,
                    "layout_seed": s.layout_seed,
                    "scene_file": f"scenes/{s.scene_id}.json"
                }
                for s in manifest.scenes
            ],
            "videos": {scene: f"videos/{vid}" for scene, vid in sorted(manifest.videos.items())},
            "goals": {scene: list(objs) for scene, objs in sorted(manifest.goals.items())}
        }

    def _from_item(self, item: dict) -> DatasetManifest:
        check_version(item, self.layout.manifest, MANIFEST_FORMAT_VERSION)
        return DatasetManifest(
            scenes=[
                SceneEntry(
                    scene_id=s["scene_id"],
                    split=Split(s["split"]),
                    topology_seed=s["topology_seed"],
                    layout_seed=s["layout_seed"]
                )
                for s in item["scenes"]
            ],
            videos={scene: path.split("/", 1)[1] for scene, path in item.get("videos", {}).items()},
            goals={scene: list(objs) for scene, objs in item.get("goals", {}).items()},
            format_version=item["format_version"]
        )

    def save(self, manifest: DatasetManifest) -> str:
        manifest.validate_partition()
        atomic_write_json(self.layout.manifest, self._to_item(manifest))
        return str(self.layout.manifest)

    def get(self) -> DatasetManifest:
        return self._from_item(read_json(self.layout.manifest))

    def validate(self, manifest: DatasetManifest):
        manifest.validate_partition()
        missing = []
        for scene in manifest.scenes:
            path = self.layout.scene(scene.scene_id)
            if not path.is_file():
                missing.append(str(path))
        for video_id in manifest.videos.values():
            path = self.layout.video_dir(video_id) / "meta.json"
            if not path.is_file():
                missing.append(str(path))
        for scene_id, objects in manifest.goals.items():
            for object_id in objects:
                path = self.layout.goal_dir(scene_id, object_id) / "meta.json"
                if not path.is_file():
                    missing.append(str(path))
        if missing:
            raise ManifestValidationError(
                "Manifest references missing files: " + ", ".join(missing), missing
            )
