from typing import List, Tuple

from src.domain.entities.enums import DecoderKind, PrimitiveAction
from src.domain.entities.frame import Frame
from src.domain.entities.video import LabeledTrajectory
from src.domain.repositories.label_repository import LabelRepository
from src.infrastructure.persistence.files import DatasetLayout, atomic_write_json, read_json


class FileLabelRepository(LabelRepository):
    """``labels/<video>.<decoder>.json`` holding {video_id, decoder, tau_x, tau_y, actions}."""

    def __init__(self, root: str):
        self.layout = DatasetLayout(root)

    def save(self, trajectory: LabeledTrajectory) -> str:
        path = self.layout.labels(trajectory.video_id, trajectory.decoder.value)
        atomic_write_json(path, {
            "video_id": trajectory.video_id,
            "decoder": trajectory.decoder.value,
            "tau_x": trajectory.tau_x,
            "tau_y": trajectory.tau_y,
            "actions": [a.value for a in trajectory.pseudo_actions]
        })
        return str(path)

    def get(
        self,
        video_id: str,
        decoder: DecoderKind,
        frames: List[Frame],
        success_objects: List[Tuple[str, ...]]
    ) -> LabeledTrajectory:
        path = self.layout.labels(video_id, decoder.value)
        item = read_json(path)
        if item["video_id"] != video_id:
            raise ValueError(f"{path} labels video {item['video_id']}, expected {video_id}")
        return LabeledTrajectory(
            video_id=video_id,
            frames=list(frames),
            pseudo_actions=[PrimitiveAction(a) for a in item["actions"]],
            decoder=DecoderKind(item["decoder"]),
            tau_x=item["tau_x"],
            tau_y=item["tau_y"],
            success_objects=list(success_objects)
        )

    def exists(self, video_id: str, decoder: DecoderKind) -> bool:
        return self.layout.labels(video_id, decoder.value).is_file()
