import numpy as np
import pytest

from src.application.services.losses import cross_entropy, order_accuracy, temporal_loss
from src.domain.entities.enums import PrimitiveAction
from src.domain.entities.frame import Frame
from src.domain.entities.video import LabeledTrajectory
from src.domain.exceptions import ShapeMismatchError
from src.infrastructure.tensorcore import AdamW, no_grad
from src.infrastructure.vnbert import VNBert, build_model, clone_model, context_indices
from src.infrastructure.vnbert.model import context_token_count

from tests.conftest import noise_frames


@pytest.fixture
def model(tiny_model_config):
    return build_model(tiny_model_config)


def test_encode_inputs_shapes(model, tiny_trajectory, tiny_goals):
    frames = tiny_trajectory.frames[:3]
    e_s, e_a, e_g = model.encode_inputs(frames, tiny_trajectory.pseudo_actions[:2], tiny_goals[0].frame)
    assert e_s.shape == (3, 8)
    assert e_a.shape == (2, 4)
    assert e_g.shape == (8,)


def test_goal_shares_the_frame_encoder(model, tiny_trajectory):
    frame = tiny_trajectory.frames[5]
    e_s, _, e_g = model.encode_inputs([frame], [], frame)
    np.testing.assert_array_equal(e_s.data[0], e_g.data)


def test_encoder_rejects_wrong_frame_size(model):
    with pytest.raises(ShapeMismatchError):
        model.encode_frames(noise_frames(1, side=32))


def test_context_token_count():
    assert context_indices(17, 4) == [0, 4, 8, 12, 16]
    assert context_token_count(17, 4) == 9
    assert context_token_count(5, 1) == 9


def test_init_context_lengths(model, tiny_trajectory):
    ctx = model.init_context(tiny_trajectory)
    assert ctx.length == context_token_count(17, 4)
    assert ctx.hidden.shape == (8,)


def test_empty_context_uses_learned_default(model, tiny_trajectory):
    ctx = model.init_context(tiny_trajectory, empty_context=True)
    assert ctx.length == 0
    assert ctx.hidden is model.default_hidden
    assert model.init_context(LabeledTrajectory.empty()).length == 0


def test_context_is_deterministic(model, tiny_trajectory):
    a = model.init_context(tiny_trajectory)
    b = model.init_context(tiny_trajectory)
    np.testing.assert_array_equal(a.context.data, b.context.data)
    np.testing.assert_array_equal(a.hidden.data, b.hidden.data)


def test_context_too_long(tiny_model_config, tiny_trajectory):
    config = tiny_model_config.model_copy(update={"max_context_tokens": 4})
    with pytest.raises(ValueError):
        build_model(config).init_context(tiny_trajectory)


def test_single_frame_context_is_rejected(model):
    single = LabeledTrajectory("one", noise_frames(1), [])
    with pytest.raises(ValueError):
        model.init_context(single)


def test_step_decision_shapes(model, tiny_trajectory, tiny_goals):
    ctx = model.init_context(tiny_trajectory)
    out, next_ctx = model.step_decision(ctx, tiny_trajectory.frames[:2], [tiny_goals[0].frame] * 2)
    assert out.policy_logits.shape == (2, 10)
    assert out.q_values.shape == (2, 10)
    assert out.term_logit.shape == (2,)
    assert out.next_hidden.shape == (2, 8)
    assert next_ctx.context is ctx.context


def test_step_shapes_do_not_depend_on_context(model, tiny_trajectory, tiny_goals):
    obs, goal = [tiny_trajectory.frames[0]], [tiny_goals[0].frame]
    full, _ = model.step_decision(model.init_context(tiny_trajectory), obs, goal)
    empty, _ = model.step_decision(model.init_context(tiny_trajectory, empty_context=True), obs, goal)
    assert full.policy_logits.shape == empty.policy_logits.shape
    assert np.all(np.isfinite(empty.q_values.data))


def test_steps_leave_context_untouched(model, tiny_trajectory, tiny_goals):
    ctx = model.init_context(tiny_trajectory)
    before = ctx.context.data.copy()
    state = ctx
    for t in range(3):
        _, state = model.step_decision(state, [tiny_trajectory.frames[t]], [tiny_goals[0].frame])
    np.testing.assert_array_equal(ctx.context.data, before)
    np.testing.assert_array_equal(state.context.data, before)


def test_recurrence_is_live(model, tiny_trajectory, tiny_goals):
    ctx = model.init_context(tiny_trajectory)
    obs, goal = [tiny_trajectory.frames[3]], [tiny_goals[0].frame]
    first, state = model.step_decision(ctx, obs, goal)
    second, _ = model.step_decision(state, obs, goal)
    reset, _ = model.step_decision(ctx, obs, goal)
    assert not np.array_equal(first.policy_logits.data, second.policy_logits.data)
    np.testing.assert_array_equal(first.policy_logits.data, reset.policy_logits.data)


def test_same_seed_builds_same_model(tiny_model_config, tiny_trajectory, tiny_goals):
    a, b = build_model(tiny_model_config), build_model(tiny_model_config)
    obs, goal = [tiny_trajectory.frames[0]], [tiny_goals[0].frame]
    out_a, _ = a.step_decision(a.init_context(tiny_trajectory), obs, goal)
    out_b, _ = b.step_decision(b.init_context(tiny_trajectory), obs, goal)
    np.testing.assert_array_equal(out_a.q_values.data, out_b.q_values.data)


def test_hidden_only_heads(tiny_model_config, tiny_trajectory, tiny_goals):
    model = VNBert(tiny_model_config.model_copy(update={"q_head_input": "hidden"}))
    out, _ = model.step_decision(model.init_context(tiny_trajectory), [tiny_trajectory.frames[0]], [tiny_goals[0].frame])
    assert out.q_values.shape == (1, 10)


def test_policy_loss_reaches_every_parameter_group(model, tiny_trajectory, tiny_goals):
    ctx = model.init_context(tiny_trajectory)
    out, _ = model.step_decision(ctx, tiny_trajectory.frames[:4], [tiny_goals[0].frame] * 4)
    cross_entropy(out.policy_logits, np.array([0, 3, 6, 9])).backward()
    grads = {name: p.grad for name, p in model.named_parameters()}
    for group in ("encoder.", "sa_layers.", "ca_layers.", "policy_head."):
        assert any(g is not None and np.abs(g).sum() > 0 for name, g in grads.items() if name.startswith(group)), group


def test_temporal_utility_scores(model, tiny_trajectory):
    e, _ = model.context_embeddings(tiny_trajectory)
    scores = model.temporal_utility(e)
    assert scores.shape == (5,)
    assert np.all(np.isfinite(scores.data))


def ramp_frames(n: int = 64, side: int = 16):
    """Frames of one texture that brightens steadily, so content gives away the time order."""
    base = np.random.default_rng(21).random((side, side))
    return [Frame.from_intensities(0.1 + 0.3 * base + 0.5 * t / (n - 1)) for t in range(n)]


def utility_order_accuracy(model, frames) -> float:
    earlier, later = np.triu_indices(len(frames), k=1)
    with no_grad():
        scores = model.temporal_utility(model.encode_frames(frames)).data
    return order_accuracy(scores, earlier, later)


def test_untrained_utility_orders_at_chance(model):
    assert utility_order_accuracy(model, noise_frames(64, seed=9)) == pytest.approx(0.5, abs=0.1)


@pytest.mark.slow
def test_utility_learns_frame_order(tiny_model_config):
    model = build_model(tiny_model_config)
    frames = ramp_frames()
    earlier, later = np.triu_indices(len(frames), k=1)
    params = [(name, p) for name, p in model.named_parameters() if name.startswith(("encoder.", "utility."))]
    optimizer = AdamW(params, lr=3e-3)
    history = []
    for step in range(1, 601):
        optimizer.zero_grad()
        temporal_loss(model.temporal_utility(model.encode_frames(frames)), earlier, later).backward()
        optimizer.step()
        if step % 50 == 0:
            history.append(utility_order_accuracy(model, frames))
    assert history[-1] >= 0.90
    # order accuracy never falls back by more than five points between checks
    assert all(b >= a - 0.05 for a, b in zip(history, history[1:])), history


def test_clone_copies_weights(model):
    twin = clone_model(model)
    state, twin_state = model.state_dict(), twin.state_dict()
    assert state.keys() == twin_state.keys()
    for name in state:
        np.testing.assert_array_equal(state[name], twin_state[name])


def test_outputs_finite_on_random_inputs(model, tiny_trajectory):
    ctx = model.init_context(tiny_trajectory)
    obs, goals = noise_frames(20, seed=5), noise_frames(20, seed=6)
    with no_grad():
        out, _ = model.step_decision(ctx, obs, goals)
    for tensor in (out.policy_logits, out.q_values, out.term_logit, out.next_hidden):
        assert np.all(np.isfinite(tensor.data))
