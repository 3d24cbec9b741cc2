"""Offline training loop for the navigation policy."""
import time
from typing import Callable, Dict, List, Optional

import numpy as np

from src.application.dtos.training_dto import LossRecord, SceneTrainingData, TrainingBatch
from src.application.services.losses import (
    bce_with_logits, bcq_loss, bcq_targets, check_finite, cross_entropy, temporal_loss
)
from src.domain.services.seeding import rng_for
from src.domain.services.semantic_actions import semantic_target
from src.infrastructure.config.experiment import TrainConfig
from src.infrastructure.tensorcore import AdamW, Tensor, no_grad
from src.infrastructure.vnbert import VNBert, clone_model, context_indices

LOSS_TERMS = ("L_a", "L_d", "L_q", "L_t")


def sample_pairs(n: int, count: int, rng: np.random.Generator):
    """``count`` ordered index pairs (earlier < later) over ``n`` positions."""
    if n < 2:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty
    a = rng.integers(n, size=count)
    b = rng.integers(n - 1, size=count)
    b = b + (b >= a)
    return np.minimum(a, b), np.maximum(a, b)


def build_batch(
    scenes: List[SceneTrainingData],
    batch_size: int,
    rng: np.random.Generator,
    context_stride: int,
    temporal_pairs: int
) -> TrainingBatch:
    """Draw one scene, then ``batch_size`` (t, goal) samples from its video.

    Rewards and termination labels come from the per-frame success
    annotation: a sample is terminal when its goal object is a success at t.
    """
    if not scenes:
        raise ValueError("No training scenes")
    scene = scenes[int(rng.integers(len(scenes)))]
    traj = scene.trajectory
    n_frames = len(traj.frames)
    if n_frames < 2:
        raise ValueError(f"Scene {scene.scene_id}: trajectory needs at least 2 frames")
    if len(traj.success_objects) != n_frames:
        raise ValueError(f"Scene {scene.scene_id}: trajectory has no success annotation")
    if not scene.goals:
        raise ValueError(f"Scene {scene.scene_id} has no goal images")

    ts = rng.integers(0, n_frames - 1, size=batch_size)
    goal_idx = rng.integers(len(scene.goals), size=batch_size)
    goals = [scene.goals[int(i)] for i in goal_idx]
    success = np.array(
        [g.object_id in traj.success_objects[int(t)] for g, t in zip(goals, ts)], dtype=np.float64
    )
    targets = np.array(
        [semantic_target(traj.pseudo_actions, int(t), bool(s)) for t, s in zip(ts, success)], dtype=np.int64
    )
    n_context = len(context_indices(n_frames, context_stride))
    earlier, later = sample_pairs(n_context, temporal_pairs, rng)
    return TrainingBatch(
        scene_id=scene.scene_id,
        trajectory=traj,
        timesteps=ts,
        obs=[traj.frames[int(t)] for t in ts],
        next_obs=[traj.frames[int(t) + 1] for t in ts],
        goals=[g.frame for g in goals],
        goal_objects=[g.object_id for g in goals],
        semantic_targets=targets,
        rewards=success,
        terminal=success > 0,
        pair_earlier=earlier,
        pair_later=later
    )


class Trainer:
    """Online network, frozen target network and AdamW state.

    Every step draws its batch from ``rng_for(seed, "batch", step)``, so a
    run resumed from a checkpoint continues exactly as the uninterrupted run.
    """

    def __init__(self, model: VNBert, scenes: List[SceneTrainingData], config: TrainConfig):
        self.model = model
        self.scenes = scenes
        self.config = config
        self.target = clone_model(model)
        self.optimizer = AdamW(
            list(model.named_parameters()),
            lr=config.lr,
            betas=config.betas,
            weight_decay=config.weight_decay,
            eps=config.eps
        )
        self.step = 0

    @property
    def use_temporal(self) -> bool:
        return not self.config.ablation.no_temporal and self.config.lambda_t > 0

    def sample_batch(self, step: int) -> TrainingBatch:
        return build_batch(
            self.scenes,
            self.config.batch_size,
            rng_for(self.config.seed, "batch", step),
            self.model.config.context_stride,
            self.config.temporal_pairs
        )

    def compute_losses(self, batch: TrainingBatch) -> Dict[str, Tensor]:
        """L_a, L_d, L_q, L_t and their weighted total."""
        cfg = self.config
        model = self.model
        traj = batch.trajectory
        b = batch.size
        empty_context = cfg.ablation.no_context

        e_ctx = None
        if empty_context:
            ctx = model.init_context(traj, empty_context=True)
        else:
            e_ctx, indices = model.context_embeddings(traj)
            ctx = model.init_context_from(traj, e_ctx, indices)

        e = model.encode_frames(batch.obs + batch.next_obs + batch.goals)
        e_t, e_t1, e_g = e[:b], e[b:2 * b], e[2 * b:]
        out0, _ = model.step_embedded(ctx, e_t, e_g)

        with no_grad():
            out1, _ = model.step_embedded(ctx.with_hidden(out0.next_hidden.detach()), e_t1, e_g)
            t_ctx = self.target.init_context(traj, empty_context=empty_context)
            te = self.target.encode_frames(batch.obs + batch.next_obs + batch.goals)
            _, t_ctx1 = self.target.step_embedded(t_ctx, te[:b], te[2 * b:])
            t_out1, _ = self.target.step_embedded(t_ctx1, te[b:2 * b], te[2 * b:])

        bcq = bcq_targets(
            out1.policy_logits.data, t_out1.q_values.data, batch.rewards, batch.terminal, cfg.gamma, cfg.beta
        )
        terms = {
            "L_a": cross_entropy(out0.policy_logits, batch.semantic_targets),
            "L_d": bce_with_logits(out0.term_logit, batch.rewards),
            "L_q": bcq_loss(out0.q_values, batch.semantic_targets, bcq),
        }
        total = cfg.lambda_a * terms["L_a"] + cfg.lambda_d * terms["L_d"] + cfg.lambda_q * terms["L_q"]
        if self.use_temporal and len(batch.pair_earlier):
            if e_ctx is None:
                e_ctx, _ = model.context_embeddings(traj)
            terms["L_t"] = temporal_loss(model.temporal_utility(e_ctx), batch.pair_earlier, batch.pair_later)
            total = total + cfg.lambda_t * terms["L_t"]
        else:
            terms["L_t"] = Tensor(0.0)
        terms["total"] = total
        check_finite(terms)
        return terms

    def sync_target(self):
        with no_grad():
            self.target.copy_from(self.model)

    def train_step(self) -> LossRecord:
        started = time.perf_counter()
        batch = self.sample_batch(self.step)
        self.optimizer.zero_grad()
        terms = self.compute_losses(batch)
        terms["total"].backward()
        self.optimizer.step()
        self.step += 1
        if self.step % self.config.target_sync_interval == 0:
            self.sync_target()
        return LossRecord(
            step=self.step,
            l_a=terms["L_a"].item(),
            l_d=terms["L_d"].item(),
            l_q=terms["L_q"].item(),
            l_t=terms["L_t"].item(),
            total=terms["total"].item(),
            wall_ms=(time.perf_counter() - started) * 1000.0
        )

    def train(self, steps: int, on_step: Optional[Callable[[LossRecord], None]] = None) -> List[LossRecord]:
        records = []
        for _ in range(steps):
            record = self.train_step()
            records.append(record)
            if on_step is not None:
                on_step(record)
        return records

    # -- state ------------------------------------------------------------

    def optimizer_tensors(self) -> Dict[str, np.ndarray]:
        return self.optimizer.state.to_tensors()

    def load_state(self, optimizer_tensors: Dict[str, np.ndarray], target_state: Dict[str, np.ndarray]):
        """Restore AdamW moments, the step counter and the target network."""
        self.optimizer.state.load_tensors(optimizer_tensors)
        self.step = self.optimizer.state.step
        self.target.load_state_dict(target_state)
