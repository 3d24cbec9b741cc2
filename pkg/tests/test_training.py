import math

import numpy as np
import pytest

from src.application.dtos.training_dto import SceneTrainingData
from src.application.services.checkpointing import (
    load_model, load_training_state, save_model, save_training_state
)
from src.application.services.losses import (
    bce_with_logits, beta_mask, bcq_loss, bcq_targets, check_finite, cross_entropy, order_accuracy, temporal_loss
)
from src.application.services.trainer import Trainer, build_batch, sample_pairs
from src.domain.entities.enums import PrimitiveAction
from src.domain.entities.semantic_action import STOP_INDEX, SemanticAction
from src.domain.exceptions import CheckpointFormatError, ConfigMismatchError, NonFiniteError, ShapeMismatchError
from src.domain.services.semantic_actions import expand, semantic_target
from src.infrastructure.config.experiment import AblationFlags, TrainConfig
from src.infrastructure.persistence import BinaryCheckpointRepository
from src.infrastructure.tensorcore import Tensor
from src.infrastructure.vnbert import build_model

F, L, R = PrimitiveAction.MOVE_FORWARD, PrimitiveAction.TURN_LEFT, PrimitiveAction.TURN_RIGHT


@pytest.fixture
def scenes(tiny_trajectory, tiny_goals):
    return [SceneTrainingData("scene0", tiny_trajectory, tiny_goals)]


def test_semantic_action_index_mapping():
    assert [str(SemanticAction.from_index(i)) for i in range(10)] == [
        "F1", "F2", "F3", "L1", "L2", "L3", "R1", "R2", "R3", "STOP"
    ]
    assert SemanticAction(R, 2).index == 7
    with pytest.raises(ValueError):
        SemanticAction(F, 4)


def test_expand_repeats_the_base_action():
    assert expand(SemanticAction(L, 3)) == (L, L, L)
    assert expand(SemanticAction.stop()) == ()


def test_semantic_target_caps_runs_at_three():
    assert semantic_target([F, F, F, F], 0) == 2


def test_semantic_target_single_turn():
    assert semantic_target([L, F, F], 0) == 3


def test_semantic_target_on_success():
    assert semantic_target([F, R], 1, success_now=True) == STOP_INDEX


def test_semantic_target_run_ends_at_sequence_end():
    assert semantic_target([F, R, R], 1) == 7


def test_semantic_target_out_of_range():
    with pytest.raises(IndexError):
        semantic_target([F], 1)


def test_uniform_policy_masks_nothing():
    assert beta_mask(np.full((1, 10), 0.1), 0.5).all()


def test_beta_mask_ratio_rule():
    probs = np.array([[0.5, 0.3, 0.1, 0.1]])
    assert beta_mask(probs, 0.5).tolist() == [[True, True, False, False]]


def test_bcq_target_bootstraps_masked_max():
    q = np.zeros((1, 10))
    q[0, 4] = 2.0
    bcq = bcq_targets(np.zeros((1, 10)), q, np.array([0.0]), np.array([False]), gamma=0.99, beta=0.5)
    assert abs(bcq.targets[0] - 1.98) < 1e-12
    assert bcq.bootstrap_actions[0] == 4


def test_bcq_target_ignores_actions_outside_mask():
    logits = np.full((1, 10), -10.0)
    logits[0, 0] = 5.0
    q = np.zeros((1, 10))
    q[0, 1] = 100.0
    q[0, 0] = 1.0
    bcq = bcq_targets(logits, q, np.array([0.0]), np.array([False]), gamma=0.5, beta=0.5)
    assert bcq.targets[0] == pytest.approx(0.5)
    assert bcq.mask[0].tolist() == [True] + [False] * 9


def test_bcq_target_terminal_is_reward():
    q = np.full((1, 10), 5.0)
    bcq = bcq_targets(np.zeros((1, 10)), q, np.array([1.0]), np.array([True]), gamma=0.99, beta=0.5)
    assert bcq.targets[0] == 1.0


def test_bcq_mask_always_holds_policy_argmax():
    rng = np.random.default_rng(0)
    for _ in range(50):
        logits = rng.normal(size=(8, 10)) * 3
        bcq = bcq_targets(logits, rng.normal(size=(8, 10)), np.zeros(8), np.zeros(8, dtype=bool), 0.99, 0.5)
        assert bcq.mask[np.arange(8), logits.argmax(axis=1)].all()
        assert bcq.mask[np.arange(8), bcq.bootstrap_actions].all()


def test_bcq_loss_has_no_gradient_through_targets():
    q = Tensor(np.array([[1.0, 3.0], [0.0, 2.0]]), requires_grad=True)
    bcq = bcq_targets(np.zeros((2, 2)), np.ones((2, 2)), np.zeros(2), np.zeros(2, dtype=bool), 0.5, 0.5)
    loss = bcq_loss(q, np.array([1, 0]), bcq)
    loss.backward()
    assert loss.item() == pytest.approx(((3.0 - 0.5) ** 2 + (0.0 - 0.5) ** 2) / 2)
    np.testing.assert_allclose(q.grad, [[0.0, 2.5], [-0.5, 0.0]])


def test_saturated_cross_entropy():
    logits = Tensor(np.where(np.eye(10)[[2, 7]] > 0, 20.0, 0.0))
    assert cross_entropy(logits, np.array([2, 7])).item() < 0.01


def test_cross_entropy_of_uniform_logits():
    assert cross_entropy(Tensor(np.zeros((3, 10))), np.array([0, 4, 9])).item() == pytest.approx(math.log(10))


def test_bce_with_logits():
    value = bce_with_logits(Tensor(np.array([0.0, 0.0])), np.array([1.0, 0.0])).item()
    assert value == pytest.approx(math.log(2))


def test_constant_utility_gives_log_two():
    earlier, later = np.array([0, 1, 2]), np.array([3, 4, 4])
    assert temporal_loss(Tensor(np.zeros(5)), earlier, later).item() == pytest.approx(math.log(2))


def test_order_accuracy():
    assert order_accuracy(np.array([0.0, 1.0, 2.0]), np.array([0, 1, 2]), np.array([1, 2, 0])) == pytest.approx(2 / 3)


def test_check_finite_names_the_term():
    with pytest.raises(NonFiniteError, match="L_q"):
        check_finite({"L_a": Tensor(1.0), "L_q": Tensor(np.inf)})


def test_sample_pairs_are_ordered():
    earlier, later = sample_pairs(5, 200, np.random.default_rng(0))
    assert np.all(earlier < later)
    assert later.max() <= 4


def test_build_batch_labels_from_success_annotation(scenes):
    batch = build_batch(scenes, 32, np.random.default_rng(0), context_stride=4, temporal_pairs=6)
    assert batch.size == 32
    for t, target, reward in zip(batch.timesteps, batch.semantic_targets, batch.rewards):
        assert 0 <= t < 16
        assert reward == (1.0 if t >= 12 else 0.0)
        assert (target == STOP_INDEX) == (t >= 12)
    assert np.array_equal(batch.terminal, batch.rewards > 0)
    assert len(batch.pair_earlier) == 6


def test_build_batch_needs_goals(tiny_trajectory):
    with pytest.raises(ValueError):
        build_batch([SceneTrainingData("s", tiny_trajectory, [])], 2, np.random.default_rng(0), 4, 2)


def test_initial_policy_loss_is_near_log_ten(tiny_model_config, tiny_train_config, scenes):
    trainer = Trainer(build_model(tiny_model_config), scenes, tiny_train_config.model_copy(update={"batch_size": 16}))
    terms = trainer.compute_losses(trainer.sample_batch(0))
    assert abs(terms["L_a"].item() - math.log(10)) < 0.5


def test_train_step_produces_finite_losses(tiny_model_config, tiny_train_config, scenes):
    trainer = Trainer(build_model(tiny_model_config), scenes, tiny_train_config)
    records = trainer.train(2)
    assert [r.step for r in records] == [1, 2]
    for r in records:
        assert all(math.isfinite(v) for v in (r.l_a, r.l_d, r.l_q, r.l_t, r.total))
        assert r.l_t > 0
        assert r.total == pytest.approx(r.l_a + r.l_d + r.l_q + r.l_t)


def test_no_temporal_drops_the_coherence_term(tiny_model_config, tiny_train_config, scenes):
    config = tiny_train_config.model_copy(update={"ablation": AblationFlags(no_temporal=True)})
    trainer = Trainer(build_model(tiny_model_config), scenes, config)
    record = trainer.train_step()
    assert record.l_t == 0.0
    assert record.total == pytest.approx(record.l_a + record.l_d + record.l_q)


def test_no_context_training_step(tiny_model_config, tiny_train_config, scenes):
    config = tiny_train_config.model_copy(update={"ablation": AblationFlags(no_context=True)})
    record = Trainer(build_model(tiny_model_config), scenes, config).train_step()
    assert math.isfinite(record.total)


def test_target_network_syncs_on_interval(tiny_model_config, tiny_train_config, scenes):
    trainer = Trainer(build_model(tiny_model_config), scenes, tiny_train_config)
    trainer.train_step()
    name = "policy_head.fc1.weight"
    assert not np.array_equal(trainer.target.state_dict()[name], trainer.model.state_dict()[name])
    trainer.train_step()
    np.testing.assert_array_equal(trainer.target.state_dict()[name], trainer.model.state_dict()[name])


def test_training_is_deterministic(tiny_model_config, tiny_train_config, scenes):
    a = Trainer(build_model(tiny_model_config), scenes, tiny_train_config).train(2)
    b = Trainer(build_model(tiny_model_config), scenes, tiny_train_config).train(2)
    assert [r.total for r in a] == [r.total for r in b]


@pytest.mark.slow
def test_total_loss_decreases(tiny_model_config, tiny_train_config, scenes):
    totals = [r.total for r in Trainer(build_model(tiny_model_config), scenes, tiny_train_config).train(500)]
    assert np.mean(totals[-50:]) < np.mean(totals[:50])


def test_resume_from_checkpoint_continues_identically(tmp_path, tiny_model_config, tiny_train_config, scenes):
    straight_trainer = Trainer(build_model(tiny_model_config), scenes, tiny_train_config)
    straight = straight_trainer.train(4)
    straight_model = straight_trainer.model

    repo = BinaryCheckpointRepository()
    path = str(tmp_path / "model.ckpt")
    first = Trainer(build_model(tiny_model_config), scenes, tiny_train_config)
    first.train(2)
    save_model(repo, path, first.model)
    save_training_state(repo, path, first.optimizer_tensors(), first.target)

    resumed = Trainer(load_model(repo, path, expected=tiny_model_config), scenes, tiny_train_config)
    resumed.load_state(*load_training_state(repo, path))
    assert resumed.step == 2
    tail = resumed.train(2)
    assert [r.total for r in tail] == [r.total for r in straight[2:]]
    for name, value in straight_model.state_dict().items():
        np.testing.assert_array_equal(resumed.model.state_dict()[name], value)


def test_checkpoint_round_trip_is_bit_identical(tmp_path, tiny_model_config):
    repo = BinaryCheckpointRepository()
    path = str(tmp_path / "model.ckpt")
    model = build_model(tiny_model_config)
    save_model(repo, path, model)
    loaded = load_model(repo, path)
    assert loaded.config == tiny_model_config
    for name, value in model.state_dict().items():
        np.testing.assert_array_equal(loaded.state_dict()[name], value)


def test_checkpoint_with_other_config_is_rejected(tmp_path, tiny_model_config):
    repo = BinaryCheckpointRepository()
    path = str(tmp_path / "model.ckpt")
    save_model(repo, path, build_model(tiny_model_config))
    bigger = tiny_model_config.model_copy(update={"hidden_dim": 16})
    with pytest.raises(ShapeMismatchError, match="model.ckpt"):
        load_model(repo, path, expected=bigger)


def test_checkpoint_with_same_shapes_but_other_stride_is_rejected(tmp_path, tiny_model_config):
    repo = BinaryCheckpointRepository()
    path = str(tmp_path / "model.ckpt")
    save_model(repo, path, build_model(tiny_model_config))
    strided = tiny_model_config.model_copy(update={"context_stride": 2})
    with pytest.raises(ConfigMismatchError, match="context_stride") as info:
        load_model(repo, path, expected=strided)
    assert info.value.keys == ["context_stride"]


def test_checkpoint_loads_under_another_init_seed(tmp_path, tiny_model_config):
    repo = BinaryCheckpointRepository()
    path = str(tmp_path / "model.ckpt")
    model = build_model(tiny_model_config)
    save_model(repo, path, model)
    loaded = load_model(repo, path, expected=tiny_model_config.model_copy(update={"seed": 5}))
    name = "policy_head.fc1.weight"
    np.testing.assert_array_equal(loaded.state_dict()[name], model.state_dict()[name])


def test_tensors_that_do_not_fit_the_stored_config_are_rejected(tmp_path, tiny_model_config):
    repo = BinaryCheckpointRepository()
    path = str(tmp_path / "model.ckpt")
    save_model(repo, path, build_model(tiny_model_config.model_copy(update={"hidden_dim": 16})))
    repo.save_sidecar(path, {"format_version": 1, "model": tiny_model_config.model_dump(mode="json")})
    with pytest.raises(ShapeMismatchError, match="model.ckpt"):
        load_model(repo, path, expected=tiny_model_config)


def test_corrupted_checkpoint_names_the_file(tmp_path, tiny_model_config):
    repo = BinaryCheckpointRepository()
    path = tmp_path / "model.ckpt"
    save_model(repo, str(path), build_model(tiny_model_config))
    path.write_bytes(b"XXXXXXXX" + path.read_bytes()[8:])
    with pytest.raises(CheckpointFormatError, match="model.ckpt"):
        load_model(repo, str(path))


def test_default_train_config_values():
    config = TrainConfig()
    assert config.beta == 0.5
    assert config.batch_size == 26
    assert config.gamma == 0.99
