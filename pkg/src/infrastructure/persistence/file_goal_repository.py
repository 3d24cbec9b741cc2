from pathlib import Path
from typing import List

from src.domain.entities.maze import Pose
from src.domain.entities.video import GoalImage
from src.domain.exceptions import ChecksumMismatchError
from src.domain.repositories.goal_repository import GoalRepository
from src.infrastructure.persistence.files import (
    FORMAT_VERSION, DatasetLayout, atomic_write_bytes, atomic_write_json,
    check_version, decode_pgm, encode_pgm, read_json, sha256
)

VIEW_PATTERN = "view_{:02d}.pgm"


class FileGoalRepository(GoalRepository):
    """``goals/<scene>/<object>/view_%02d.pgm`` plus ``meta.json``."""

    def __init__(self, root: str):
        self.layout = DatasetLayout(root)

    def save(self, scene_id: str, object_id: str, images: List[GoalImage]) -> str:
        directory = self.layout.goal_dir(scene_id, object_id)
        views = []
        for i, image in enumerate(images):
            data = encode_pgm(image.frame)
            name = VIEW_PATTERN.format(i)
            atomic_write_bytes(directory / name, data)
            pose = image.capture_pose
            views.append({"file": name, "sha256": sha256(data), "pose": [pose.x, pose.y, pose.heading]})
        atomic_write_json(directory / "meta.json", {
            "format_version": FORMAT_VERSION,
            "scene_id": scene_id,
            "object_id": object_id,
            "views": views
        })
        return str(directory)

    def get(self, scene_id: str, object_id: str) -> List[GoalImage]:
        directory = self.layout.goal_dir(scene_id, object_id)
        meta_path = directory / "meta.json"
        meta = read_json(meta_path)
        check_version(meta, meta_path)
        images = []
        for i, view in enumerate(meta["views"]):
            data = Path(directory / view["file"]).read_bytes()
            frame = decode_pgm(data, i)
            if sha256(data) != view["sha256"]:
                raise ChecksumMismatchError(f"Goal {scene_id}/{object_id}: checksum mismatch on view {i}")
            x, y, heading = view["pose"]
            images.append(GoalImage(frame=frame, object_id=object_id, capture_pose=Pose(x, y, int(heading)), view_index=i))
        return images

    def exists(self, scene_id: str, object_id: str) -> bool:
        return (self.layout.goal_dir(scene_id, object_id) / "meta.json").is_file()
