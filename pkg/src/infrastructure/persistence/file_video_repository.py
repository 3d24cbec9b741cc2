from pathlib import Path

from src.domain.entities.enums import PrimitiveAction
from src.domain.entities.maze import Pose
from src.domain.entities.video import Video
from src.domain.exceptions import ChecksumMismatchError
from src.domain.repositories.video_repository import VideoRepository
from src.infrastructure.persistence.files import (
    FORMAT_VERSION, DatasetLayout, atomic_write_bytes, atomic_write_json,
    check_version, decode_pgm, encode_pgm, read_json, sha256
)

FRAME_PATTERN = "frame_{:05d}.pgm"


class FileVideoRepository(VideoRepository):
    """PGM-per-frame implementation of VideoRepository.

    ``videos/<id>/frame_%05d.pgm`` plus ``meta.json``. True actions and poses
    live under the sidecar's ``oracle`` key.
    """

    def __init__(self, root: str):
        self.layout = DatasetLayout(root)

    def _to_meta(self, video: Video, checksums) -> dict:
        meta = {
            "format_version": FORMAT_VERSION,
            "video_id": video.id,
            "scene_id": video.scene_id,
            "seed": video.seed,
            "n_frames": len(video.frames),
            "width": video.frames[0].width if video.frames else 0,
            "height": video.frames[0].height if video.frames else 0,
            "checksums": checksums,
            "success_objects": [list(objs) for objs in video.success_objects]
        }
        if video.has_oracle:
            oracle = {"true_actions": [a.value for a in video.true_actions]}
            if video.poses is not None:
                oracle["poses"] = [[p.x, p.y, p.heading] for p in video.poses]
            meta["oracle"] = oracle
        return meta

    def save(self, video: Video) -> str:
        directory = self.layout.video_dir(video.id)
        checksums = []
        for i, frame in enumerate(video.frames):
            data = encode_pgm(frame)
            atomic_write_bytes(directory / FRAME_PATTERN.format(i), data)
            checksums.append(sha256(data))
        atomic_write_json(directory / "meta.json", self._to_meta(video, checksums))
        return str(directory)

    def get(self, video_id: str, include_oracle: bool = False) -> Video:
        directory = self.layout.video_dir(video_id)
        meta_path = directory / "meta.json"
        meta = read_json(meta_path)
        check_version(meta, meta_path)
        frames = []
        for i, expected in enumerate(meta["checksums"]):
            data = Path(directory / FRAME_PATTERN.format(i)).read_bytes()
            frame = decode_pgm(data, i)
            if sha256(data) != expected:
                raise ChecksumMismatchError(f"Video {video_id}: checksum mismatch on frame {i}")
            frames.append(frame)

        true_actions = poses = None
        if include_oracle and "oracle" in meta:
            oracle = meta["oracle"]
            true_actions = [PrimitiveAction(a) for a in oracle["true_actions"]]
            if "poses" in oracle:
                poses = [Pose(x, y, int(h)) for x, y, h in oracle["poses"]]
        return Video(
            id=meta["video_id"],
            scene_id=meta["scene_id"],
            seed=meta["seed"],
            frames=frames,
            success_objects=[tuple(objs) for objs in meta["success_objects"]],
            true_actions=true_actions,
            poses=poses
        )

    def exists(self, video_id: str) -> bool:
        return (self.layout.video_dir(video_id) / "meta.json").is_file()
