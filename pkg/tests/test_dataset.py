import json

import numpy as np
import pytest

from src.application.use_cases.scene_generation_use_case import SceneGenerationUseCase, plan_scenes
from src.domain.entities.enums import DecoderKind, PrimitiveAction, Split
from src.domain.entities.manifest import DatasetManifest, SceneEntry
from src.domain.entities.video import LabeledTrajectory
from src.domain.exceptions import (
    CheckpointFormatError, ChecksumMismatchError, CorruptFrameError, FormatVersionError, ManifestValidationError
)
from src.domain.services.roamer import extract_goal_images, roam
from src.domain.services.seeding import derive_seed, rng_for
from src.infrastructure.config.experiment import ScenePlan
from src.infrastructure.persistence import (
    BinaryCheckpointRepository, FileArtifactRepository, FileGoalRepository, FileLabelRepository,
    FileManifestRepository, FileSceneRepository, FileVideoRepository
)
from src.infrastructure.persistence.binary_checkpoint_repository import decode_checkpoint, encode_checkpoint
from src.infrastructure.persistence.files import decode_pgm, encode_pgm


@pytest.fixture
def small_plan():
    return ScenePlan(n_train_topologies=2, layouts_per_topology=2, n_unseen_layout=3, n_unseen_room=2)


@pytest.fixture
def tiny_video(tiny_maze):
    return roam(tiny_maze, seed=2, steps=12, width=16, height=16, video_id="tiny_v0")


def test_derive_seed_is_stable_and_keyed():
    assert derive_seed(0, "topology", 1) == derive_seed(0, "topology", 1)
    assert derive_seed(0, "topology", 1) != derive_seed(0, "topology", 2)
    assert rng_for(3, "batch", 7).random() == rng_for(3, "batch", 7).random()


def test_derive_seed_rejects_negative_parts():
    with pytest.raises(ValueError):
        derive_seed(-1)


def test_plan_scenes_counts(small_plan):
    entries = plan_scenes(small_plan, seed=0)
    by_split = {split: [e for e in entries if e.split == split] for split in Split}
    assert len(by_split[Split.TRAIN]) == 4
    assert len(by_split[Split.UNSEEN_LAYOUT]) == 3
    assert len(by_split[Split.UNSEEN_ROOM]) == 2
    assert len({e.scene_id for e in entries}) == len(entries)


def test_unseen_layouts_reuse_training_topologies(small_plan):
    entries = plan_scenes(small_plan, seed=0)
    train_topologies = {e.topology_seed for e in entries if e.split == Split.TRAIN}
    train_pairs = {(e.topology_seed, e.layout_seed) for e in entries if e.split == Split.TRAIN}
    for entry in entries:
        if entry.split == Split.UNSEEN_LAYOUT:
            assert entry.topology_seed in train_topologies
            assert (entry.topology_seed, entry.layout_seed) not in train_pairs
        if entry.split == Split.UNSEEN_ROOM:
            assert entry.topology_seed not in train_topologies


def test_scene_generation_writes_manifest(tmp_path, small_plan):
    use_case = SceneGenerationUseCase(FileSceneRepository(str(tmp_path)), FileManifestRepository(str(tmp_path)))
    result = use_case.execute(small_plan, seed=0)

    assert result.scenes_by_split == {"train": 4, "unseen_layout": 3, "unseen_room": 2}
    manifest = FileManifestRepository(str(tmp_path)).get()
    assert [s.scene_id for s in manifest.scenes] == [s.scene_id for s in result.manifest.scenes]
    FileManifestRepository(str(tmp_path)).validate(manifest)


def test_scene_generation_is_reproducible(tmp_path, small_plan):
    for name in ("a", "b"):
        root = str(tmp_path / name)
        SceneGenerationUseCase(FileSceneRepository(root), FileManifestRepository(root)).execute(small_plan, seed=4)
    a = FileSceneRepository(str(tmp_path / "a"))
    b = FileSceneRepository(str(tmp_path / "b"))
    assert a.list_ids() == b.list_ids()
    for scene_id in a.list_ids():
        assert a.get(scene_id).same_content(b.get(scene_id))


def test_scene_round_trip(tmp_path, tiny_maze):
    repo = FileSceneRepository(str(tmp_path))
    repo.save(tiny_maze)
    loaded = repo.get(tiny_maze.id)
    assert loaded.same_content(tiny_maze)
    assert repo.exists(tiny_maze.id)
    assert repo.list_ids() == [tiny_maze.id]


def test_scene_with_wrong_version(tmp_path, tiny_maze):
    repo = FileSceneRepository(str(tmp_path))
    path = repo.save(tiny_maze)
    item = json.loads(open(path).read())
    item["format_version"] = 99
    with open(path, "w") as handle:
        json.dump(item, handle)
    with pytest.raises(FormatVersionError):
        repo.get(tiny_maze.id)


def test_pgm_round_trip(textured_frame):
    assert decode_pgm(encode_pgm(textured_frame)) == textured_frame


def test_truncated_pgm_reports_frame_index(textured_frame):
    data = encode_pgm(textured_frame)[:-10]
    with pytest.raises(CorruptFrameError) as exc_info:
        decode_pgm(data, frame_index=7)
    assert exc_info.value.frame_index == 7


def test_video_round_trip_hides_oracle_by_default(tmp_path, tiny_video):
    repo = FileVideoRepository(str(tmp_path))
    repo.save(tiny_video)

    loaded = repo.get("tiny_v0")
    assert loaded.frames == tiny_video.frames
    assert loaded.success_objects == tiny_video.success_objects
    assert not loaded.has_oracle

    with_oracle = repo.get("tiny_v0", include_oracle=True)
    assert with_oracle.true_actions == tiny_video.true_actions
    assert with_oracle.poses == tiny_video.poses


def test_truncated_video_frame(tmp_path, tiny_video):
    repo = FileVideoRepository(str(tmp_path))
    directory = repo.save(tiny_video)
    frame_path = tmp_path / "videos" / "tiny_v0" / "frame_00003.pgm"
    frame_path.write_bytes(frame_path.read_bytes()[:-5])
    with pytest.raises(CorruptFrameError) as exc_info:
        repo.get("tiny_v0")
    assert exc_info.value.frame_index == 3
    assert directory.endswith("tiny_v0")


def test_tampered_video_frame(tmp_path, tiny_video):
    repo = FileVideoRepository(str(tmp_path))
    repo.save(tiny_video)
    frame_path = tmp_path / "videos" / "tiny_v0" / "frame_00001.pgm"
    data = bytearray(frame_path.read_bytes())
    data[-1] = (data[-1] + 1) % 256
    frame_path.write_bytes(bytes(data))
    with pytest.raises(ChecksumMismatchError):
        repo.get("tiny_v0")


def test_goal_round_trip(tmp_path, tiny_maze):
    images = extract_goal_images(tiny_maze, "obj0", k=2, width=16, height=16)
    repo = FileGoalRepository(str(tmp_path))
    repo.save(tiny_maze.id, "obj0", images)
    assert repo.get(tiny_maze.id, "obj0") == images
    assert repo.exists(tiny_maze.id, "obj0")
    assert not repo.exists(tiny_maze.id, "obj1")


def test_label_round_trip(tmp_path, tiny_trajectory):
    repo = FileLabelRepository(str(tmp_path))
    labeled = LabeledTrajectory(
        tiny_trajectory.video_id,
        tiny_trajectory.frames,
        tiny_trajectory.pseudo_actions,
        decoder=DecoderKind.MATCHING,
        tau_x=4.5,
        tau_y=3.0,
        success_objects=tiny_trajectory.success_objects
    )
    repo.save(labeled)
    loaded = repo.get("tiny_v0", DecoderKind.MATCHING, labeled.frames, labeled.success_objects)
    assert loaded.pseudo_actions == labeled.pseudo_actions
    assert (loaded.tau_x, loaded.tau_y) == (4.5, 3.0)
    assert repo.exists("tiny_v0", DecoderKind.MATCHING)
    assert not repo.exists("tiny_v0", DecoderKind.FLOW)


def test_trajectory_rejects_stop_labels(tiny_trajectory):
    actions = list(tiny_trajectory.pseudo_actions)
    actions[0] = PrimitiveAction.STOP
    with pytest.raises(ValueError):
        LabeledTrajectory("bad", tiny_trajectory.frames, actions)


def test_manifest_validation_lists_missing_files(tmp_path):
    manifest = DatasetManifest(
        scenes=[SceneEntry("ghost", Split.TRAIN, 1, 2)],
        videos={"ghost": "ghost_v0"},
        goals={"ghost": ["obj0"]}
    )
    repo = FileManifestRepository(str(tmp_path))
    repo.save(manifest)
    with pytest.raises(ManifestValidationError) as exc_info:
        repo.validate(repo.get())
    missing = exc_info.value.missing_paths
    assert len(missing) == 3
    assert any(path.endswith("ghost.json") for path in missing)
    assert any("ghost_v0" in path for path in missing)


def test_manifest_rejects_duplicate_scene_ids(tmp_path):
    manifest = DatasetManifest(scenes=[SceneEntry("a", Split.TRAIN, 1, 2), SceneEntry("a", Split.UNSEEN_ROOM, 3, 4)])
    with pytest.raises(ValueError):
        FileManifestRepository(str(tmp_path)).save(manifest)


def test_checkpoint_codec_round_trip():
    tensors = {"w": np.arange(6, dtype=np.float64).reshape(2, 3), "b": np.array(1.5)}
    decoded = decode_checkpoint(encode_checkpoint(tensors))
    assert set(decoded) == {"w", "b"}
    np.testing.assert_array_equal(decoded["w"], tensors["w"])
    assert decoded["b"].shape == ()


def test_checkpoint_bad_magic():
    with pytest.raises(CheckpointFormatError):
        decode_checkpoint(b"NOTACKPT" + bytes(8))


def test_checkpoint_truncated():
    data = encode_checkpoint({"w": np.ones((4, 4))})
    with pytest.raises(CheckpointFormatError):
        decode_checkpoint(data[:-3])


def test_checkpoint_trailing_bytes():
    data = encode_checkpoint({"w": np.ones(2)})
    with pytest.raises(CheckpointFormatError):
        decode_checkpoint(data + b"\x00")


def test_checkpoint_repository_sidecar(tmp_path):
    repo = BinaryCheckpointRepository()
    path = str(tmp_path / "run" / "model.ckpt")
    repo.save(path, {"w": np.zeros(3)})
    repo.save_sidecar(path, {"format_version": 1, "model": {"hidden_dim": 8}})
    assert repo.exists(path)
    assert repo.load_sidecar(path)["model"] == {"hidden_dim": 8}
    assert not repo.exists(str(tmp_path / "missing.ckpt"))


def test_artifact_tables(tmp_path):
    repo = FileArtifactRepository(str(tmp_path))
    repo.append_rows("logs/loss.csv", ["step", "total"], [[1, 0.5]], truncate=True)
    repo.append_rows("logs/loss.csv", ["step", "total"], [[2, 0.25]])
    rows = repo.read_table("logs/loss.csv")
    assert rows == [{"step": "1", "total": "0.5"}, {"step": "2", "total": "0.25"}]

    repo.write_table("results/full/seed_0.csv", ["a"], [[1]])
    repo.write_table("results/full/seed_1.csv", ["a"], [[2]])
    assert repo.list("results/*/seed_*.csv") == ["results/full/seed_0.csv", "results/full/seed_1.csv"]
