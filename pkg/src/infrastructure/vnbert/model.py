"""Recurrent in-context navigation policy.

A self-attention stack encodes the context video once into e^c plus an
initial hidden state. Each decision step lets the [hidden, observation,
goal] tokens cross-attend over [hidden, e^c, observation, goal] and reads
the policy, Q-value and termination heads from the fused result.
"""
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from src.domain.entities.enums import PrimitiveAction
from src.domain.entities.frame import Frame
from src.domain.entities.semantic_action import N_SEMANTIC_ACTIONS
from src.domain.entities.video import LabeledTrajectory
from src.domain.exceptions import ShapeMismatchError
from src.infrastructure.config.experiment import ModelConfig
from src.infrastructure.tensorcore import Embedding, Linear, Module, Tensor, concat, no_grad
from src.infrastructure.tensorcore.nn import parameter
from src.infrastructure.vnbert.layers import (
    CrossAttentionLayer, FrameEncoder, Head, SelfAttentionLayer, TemporalUtility
)

N_ACTION_TOKENS = 4
TOKEN_HIDDEN, TOKEN_OBSERVATION, TOKEN_GOAL = 0, 1, 2


@dataclass
class ContextState:
    """Encoded context e^c (L, hidden) and the current hidden state (hidden,) or (B, hidden)."""
    context: Tensor
    hidden: Tensor

    @property
    def length(self) -> int:
        return self.context.shape[0]

    def with_hidden(self, hidden: Tensor) -> "ContextState":
        return ContextState(self.context, hidden)


@dataclass
class DecisionOutputs:
    policy_logits: Tensor
    q_values: Tensor
    term_logit: Tensor
    next_hidden: Tensor


def context_indices(n_frames: int, stride: int) -> List[int]:
    return list(range(0, n_frames, stride))


def context_token_count(n_frames: int, stride: int) -> int:
    """Interleaved frame and action tokens for a strided trajectory (hidden token excluded)."""
    n = len(context_indices(n_frames, stride))
    return max(2 * n - 1, 0)


class VNBert(Module):
    def __init__(self, config: ModelConfig):
        super().__init__()
        self.config = config
        rng = np.random.default_rng(config.seed)
        h = config.hidden_dim
        self.encoder = FrameEncoder(config.frame_height, config.frame_width, config.visual_dim, rng)
        self.action_embedding = Embedding(N_ACTION_TOKENS, config.action_dim, rng)
        self.visual_to_hidden = Linear(config.visual_dim, h, rng)
        self.action_to_hidden = Linear(config.action_dim, h, rng)
        self.position_embedding = Embedding(config.max_context_tokens, h, rng)
        self.type_embedding = Embedding(3, h, rng)
        self.sa_layers = [SelfAttentionLayer(h, config.n_heads, rng) for _ in range(config.n_sa_layers)]
        self.ca_layers = [CrossAttentionLayer(h, config.n_heads, rng) for _ in range(config.n_ca_layers)]
        self.default_hidden = parameter(rng.normal(0.0, 0.02, size=h))
        fused_dim = 2 * h
        head_in = h if config.q_head_input == "hidden" else fused_dim + h
        self.policy_head = Head(fused_dim, h, N_SEMANTIC_ACTIONS, rng)
        self.q_head = Head(head_in, h, N_SEMANTIC_ACTIONS, rng)
        self.term_head = Head(head_in, h, 1, rng)
        self.utility = TemporalUtility(config.visual_dim, rng)

    # -- encoders ---------------------------------------------------------

    def encode_frames(self, frames: Sequence[Frame]) -> Tensor:
        return self.encoder(list(frames))

    def encode_actions(self, actions: Sequence[PrimitiveAction]) -> Tensor:
        return self.action_embedding([a.token for a in actions])

    def encode_inputs(
        self,
        frames: Sequence[Frame],
        actions: Sequence[PrimitiveAction],
        goal: Frame
    ) -> Tuple[Tensor, Tensor, Tensor]:
        """Observation, action and goal embeddings; the goal shares the frame encoder."""
        e_s = self.encode_frames(list(frames) + [goal])
        e_a = self.encode_actions(actions)
        n = len(frames)
        return e_s[:n], e_a, e_s[n]

    # -- context ----------------------------------------------------------

    def context_embeddings(self, trajectory: LabeledTrajectory) -> Tuple[Tensor, List[int]]:
        indices = context_indices(len(trajectory.frames), self.config.context_stride)
        return self.encode_frames([trajectory.frames[i] for i in indices]), indices

    def init_context(self, trajectory: LabeledTrajectory, empty_context: bool = False) -> ContextState:
        """Run the self-attention stack over the strided context plus a zero hidden token.

        Args:
            trajectory: Labeled context video.
            empty_context: Skip the context entirely and start from the
                learned default hidden state.

        Returns:
            ContextState with e^c and h_0.
        """
        h = self.config.hidden_dim
        if empty_context or trajectory.is_empty:
            return ContextState(Tensor(np.zeros((0, h))), self.default_hidden)
        if len(trajectory.frames) < 2:
            raise ValueError(f"Context trajectory {trajectory.video_id} needs at least 2 frames")

        e_s, indices = self.context_embeddings(trajectory)
        return self.init_context_from(trajectory, e_s, indices)

    def init_context_from(self, trajectory: LabeledTrajectory, e_s: Tensor, indices: List[int]) -> ContextState:
        """Context init from precomputed strided frame embeddings."""
        h = self.config.hidden_dim
        n = len(indices)
        total = 2 * n - 1 + 1
        if total > self.config.max_context_tokens:
            raise ValueError(
                f"Context of {total} tokens exceeds max_context_tokens={self.config.max_context_tokens}; "
                f"raise context_stride (now {self.config.context_stride})"
            )
        frame_tokens = self.visual_to_hidden(e_s)
        blocks = [frame_tokens]
        if n > 1:
            actions = [trajectory.pseudo_actions[i] for i in indices[:-1]]
            blocks.append(self.action_to_hidden(self.encode_actions(actions)))
        blocks.append(Tensor(np.zeros((1, h))))
        stacked = concat(blocks, axis=0)
        # frames sit at rows 0..n-1, actions at n..2n-2, the hidden token last
        order = []
        for i in range(n):
            order.append(i)
            if i < n - 1:
                order.append(n + i)
        order.append(2 * n - 1)
        tokens = stacked[np.asarray(order)] + self.position_embedding(np.arange(total))
        for layer in self.sa_layers:
            tokens = layer(tokens)
        return ContextState(tokens[:-1], tokens[total - 1])

    # -- recurrent step ---------------------------------------------------

    def step_embedded(self, ctx: ContextState, e_s: Tensor, e_g: Tensor) -> Tuple[DecisionOutputs, ContextState]:
        """Decision step from precomputed (B, visual_dim) observation and goal embeddings."""
        if ctx is None:
            raise ValueError("step_decision needs an initialized context")
        if e_s.shape != e_g.shape or e_s.ndim != 2:
            raise ShapeMismatchError(f"Observation {e_s.shape} and goal {e_g.shape} embeddings must be (B, d)")
        b = e_s.shape[0]
        h = self.config.hidden_dim
        hidden = ctx.hidden
        if hidden.ndim == 1:
            hidden = hidden.reshape(1, h).broadcast_to((b, h))
        queries = concat([
            hidden.reshape(b, 1, h),
            self.visual_to_hidden(e_s).reshape(b, 1, h),
            self.visual_to_hidden(e_g).reshape(b, 1, h),
        ], axis=1) + self.type_embedding([TOKEN_HIDDEN, TOKEN_OBSERVATION, TOKEN_GOAL])
        context = ctx.context.reshape(1, ctx.length, h).broadcast_to((b, ctx.length, h))
        for layer in self.ca_layers:
            sequence = concat([queries[:, :1], context, queries[:, 1:]], axis=1)
            queries = layer(queries, sequence)

        next_hidden = queries[:, TOKEN_HIDDEN]
        fused = concat([queries[:, TOKEN_OBSERVATION] * queries[:, TOKEN_GOAL], next_hidden], axis=-1)
        head_in = next_hidden if self.config.q_head_input == "hidden" else concat([fused, next_hidden], axis=-1)
        outputs = DecisionOutputs(
            policy_logits=self.policy_head(fused),
            q_values=self.q_head(head_in),
            term_logit=self.term_head(head_in).reshape(b),
            next_hidden=next_hidden
        )
        return outputs, ctx.with_hidden(next_hidden)

    def step_decision(
        self,
        ctx: ContextState,
        obs: Sequence[Frame],
        goal: Sequence[Frame]
    ) -> Tuple[DecisionOutputs, ContextState]:
        """Encode a batch of (observation, goal) frames and take one decision step."""
        if len(obs) != len(goal):
            raise ShapeMismatchError(f"{len(obs)} observations but {len(goal)} goals")
        e = self.encode_frames(list(obs) + list(goal))
        b = len(obs)
        return self.step_embedded(ctx, e[:b], e[b:])

    def temporal_utility(self, e: Tensor) -> Tensor:
        return self.utility(e)

    def copy_from(self, other: "VNBert"):
        self.load_state_dict(other.state_dict())


def build_model(config: ModelConfig) -> VNBert:
    return VNBert(config)


def clone_model(model: VNBert) -> VNBert:
    """A structurally identical model holding the same weights."""
    clone = VNBert(model.config)
    with no_grad():
        clone.copy_from(model)
    return clone


def outputs_to_numpy(outputs: DecisionOutputs, row: int = 0) -> Tuple[np.ndarray, np.ndarray, float]:
    return (
        outputs.policy_logits.data[row].copy(),
        outputs.q_values.data[row].copy(),
        float(outputs.term_logit.data[row])
    )

