"""
Embedding Dump Use Case.
"""
from typing import Optional

from src.application.dtos.pipeline_dto import EmbeddingDumpDTO
from src.application.services.checkpointing import load_model
from src.domain.repositories import ArtifactRepository, CheckpointRepository, ManifestRepository, VideoRepository
from src.infrastructure.config.experiment import ModelConfig
from src.infrastructure.config.logging import logger
from src.infrastructure.tensorcore import no_grad
from src.infrastructure.vnbert import context_indices


class EmbeddingDumpUseCase:
    """Writes the frame embeddings of a context video for external visualization."""

    def __init__(
        self,
        manifest_repository: ManifestRepository,
        video_repository: VideoRepository,
        checkpoint_repository: CheckpointRepository,
        artifact_repository: ArtifactRepository
    ):
        self.manifest_repository = manifest_repository
        self.video_repository = video_repository
        self.checkpoint_repository = checkpoint_repository
        self.artifact_repository = artifact_repository

    def execute(
        self,
        scene_id: str,
        checkpoint: str,
        model_config: Optional[ModelConfig] = None,
        out_path: str = "embeddings.csv"
    ) -> EmbeddingDumpDTO:
        """One row per strided context frame: frame_index, dim_0..dim_{d-1}."""
        manifest = self.manifest_repository.get()
        video_id = manifest.videos.get(scene_id)
        if video_id is None:
            raise ValueError(f"Scene {scene_id} has no collected video")
        model = load_model(self.checkpoint_repository, checkpoint, expected=model_config)
        video = self.video_repository.get(video_id)
        indices = context_indices(len(video.frames), model.config.context_stride)
        with no_grad():
            embeddings = model.encode_frames([video.frames[i] for i in indices]).data
        dim = embeddings.shape[1]
        rows = [[index, *(float(v) for v in vector)] for index, vector in zip(indices, embeddings)]
        path = self.artifact_repository.write_table(
            out_path, ["frame_index"] + [f"dim_{j}" for j in range(dim)], rows
        )
        logger.info(f"Wrote {len(rows)} embeddings of {video_id} to {path}")
        return EmbeddingDumpDTO(path=path, rows=len(rows), dim=dim)
