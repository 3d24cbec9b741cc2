"""Policies and the episode loop."""
import math
from typing import Optional

import numpy as np

from src.application.services.action_selection import select_action
from src.domain.entities.episode import EpisodeRecord
from src.domain.entities.frame import Frame
from src.domain.entities.maze import GoalSpec, Maze, Pose
from src.domain.entities.semantic_action import STOP_INDEX, SemanticAction
from src.domain.entities.video import GoalImage, LabeledTrajectory
from src.domain.services.kinematics import step
from src.domain.services.navigation_oracle import geodesic_distance, is_success
from src.domain.services.renderer import render
from src.domain.services.semantic_actions import expand
from src.infrastructure.config.experiment import InferenceConfig
from src.infrastructure.tensorcore import Tensor, no_grad
from src.infrastructure.vnbert import ContextState, VNBert
from src.infrastructure.vnbert.model import outputs_to_numpy


class Policy:
    needs_observation = True

    def reset(self, goal: GoalImage):
        pass

    def act(self, frame: Optional[Frame], rng: np.random.Generator) -> SemanticAction:
        raise NotImplementedError


class ModelPolicy(Policy):
    """Recurrent policy over a pre-encoded context; one instance per episode."""

    def __init__(self, model: VNBert, context: ContextState, config: InferenceConfig):
        self.model = model
        self.context = context
        self.config = config
        self.state: Optional[ContextState] = None
        self.goal_embedding: Optional[Tensor] = None

    @staticmethod
    def encode_context(model: VNBert, trajectory: LabeledTrajectory, empty_context: bool = False) -> ContextState:
        with no_grad():
            return model.init_context(trajectory, empty_context=empty_context)

    def reset(self, goal: GoalImage):
        with no_grad():
            self.goal_embedding = self.model.encode_frames([goal.frame])
        self.state = self.context

    def act(self, frame: Optional[Frame], rng: np.random.Generator) -> SemanticAction:
        if self.state is None:
            raise ValueError("ModelPolicy.act called before reset")
        with no_grad():
            e_s = self.model.encode_frames([frame])
            outputs, self.state = self.model.step_embedded(self.state, e_s, self.goal_embedding)
        logits, q_values, term = outputs_to_numpy(outputs)
        return select_action(logits, q_values, term, self.config, rng)


class RandomPolicy(Policy):
    """Uniform over the nine movement semantic actions; never stops."""
    needs_observation = False

    def act(self, frame: Optional[Frame], rng: np.random.Generator) -> SemanticAction:
        return SemanticAction.from_index(int(rng.integers(STOP_INDEX)))


def run_episode(
    maze: Maze,
    policy: Policy,
    goal: GoalImage,
    start: Pose,
    config: InferenceConfig,
    rng: np.random.Generator,
    seed: int = 0,
    success_radius: float = 1.0,
    width: int = 64,
    height: int = 64
) -> EpisodeRecord:
    """Roll a policy out from ``start`` until success, STOP or ``max_steps`` primitive steps.

    Success is checked at the start pose and after every primitive step.
    """
    spec = GoalSpec(goal.object_id, success_radius)
    shortest = geodesic_distance(maze, start, spec)
    policy.reset(goal)

    pose = start
    steps = 0
    path = 0.0
    stop_emitted = False
    success = is_success(maze, pose, spec)
    while not success and steps < config.max_steps:
        frame = render(maze, pose, width, height) if policy.needs_observation else None
        action = policy.act(frame, rng)
        if action.is_stop:
            stop_emitted = True
            break
        for primitive in expand(action):
            if steps >= config.max_steps:
                break
            moved, _ = step(maze, pose, primitive)
            path += math.hypot(moved.x - pose.x, moved.y - pose.y)
            pose = moved
            steps += 1
            if is_success(maze, pose, spec):
                success = True
                break

    return EpisodeRecord(
        scene_id=maze.id,
        goal_object=goal.object_id,
        success=success,
        steps_taken=steps,
        path_length=path,
        shortest_path=shortest,
        final_ne=geodesic_distance(maze, pose, spec),
        stop_emitted=stop_emitted,
        seed=seed
    )
