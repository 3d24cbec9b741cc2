from dependency_injector import containers, providers
from src.infrastructure.persistence import (
    FileSceneRepository,
    FileVideoRepository,
    FileGoalRepository,
    FileLabelRepository,
    FileManifestRepository,
    FileArtifactRepository,
    BinaryCheckpointRepository
)
from src.infrastructure.config import settings
from src.application.use_cases import (
    SceneGenerationUseCase,
    CollectionUseCase,
    LabelingUseCase,
    TrainingUseCase,
    EvaluationUseCase,
    ReportUseCase,
    EmbeddingDumpUseCase
)


class Container(containers.DeclarativeContainer):
    """Dependency injection container."""

    config = providers.Configuration(default={"dataset_root": settings.dataset_root})

    # Repositories
    scene_repository = providers.Factory(FileSceneRepository, root=config.dataset_root)
    video_repository = providers.Factory(FileVideoRepository, root=config.dataset_root)
    goal_repository = providers.Factory(FileGoalRepository, root=config.dataset_root)
    label_repository = providers.Factory(FileLabelRepository, root=config.dataset_root)
    manifest_repository = providers.Factory(FileManifestRepository, root=config.dataset_root)
    artifact_repository = providers.Factory(FileArtifactRepository, root=config.dataset_root)
    checkpoint_repository = providers.Singleton(BinaryCheckpointRepository)

    # Use Cases
    scene_generation_use_case = providers.Factory(
        SceneGenerationUseCase,
        scene_repository=scene_repository,
        manifest_repository=manifest_repository
    )

    collection_use_case = providers.Factory(
        CollectionUseCase,
        scene_repository=scene_repository,
        video_repository=video_repository,
        goal_repository=goal_repository,
        manifest_repository=manifest_repository
    )

    labeling_use_case = providers.Factory(
        LabelingUseCase,
        manifest_repository=manifest_repository,
        video_repository=video_repository,
        label_repository=label_repository,
        artifact_repository=artifact_repository
    )

    training_use_case = providers.Factory(
        TrainingUseCase,
        manifest_repository=manifest_repository,
        video_repository=video_repository,
        goal_repository=goal_repository,
        label_repository=label_repository,
        checkpoint_repository=checkpoint_repository,
        artifact_repository=artifact_repository
    )

    evaluation_use_case = providers.Factory(
        EvaluationUseCase,
        manifest_repository=manifest_repository,
        scene_repository=scene_repository,
        video_repository=video_repository,
        goal_repository=goal_repository,
        label_repository=label_repository,
        checkpoint_repository=checkpoint_repository,
        artifact_repository=artifact_repository
    )

    report_use_case = providers.Factory(ReportUseCase, artifact_repository=artifact_repository)

    embedding_dump_use_case = providers.Factory(
        EmbeddingDumpUseCase,
        manifest_repository=manifest_repository,
        video_repository=video_repository,
        checkpoint_repository=checkpoint_repository,
        artifact_repository=artifact_repository
    )
