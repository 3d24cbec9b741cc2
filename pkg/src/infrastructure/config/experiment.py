"""Experiment configuration tree.

Loaded from a JSON file, patched with dotted ``--set`` overrides and then
validated. Every model forbids unknown keys.
"""
import json
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from src.domain.entities.enums import DecoderKind, Split, Variant
from src.domain.entities.flow import DecoderParams


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ScenePlan(_Strict):
    n_train_topologies: int = Field(default=6, ge=1)
    layouts_per_topology: int = Field(default=3, ge=1)
    n_unseen_layout: int = Field(default=6, ge=1)
    n_unseen_room: int = Field(default=3, ge=1)
    maze_width: int = Field(default=9, ge=5)
    maze_height: int = Field(default=9, ge=5)
    n_objects: int = Field(default=4, ge=1)
    cell_size: float = Field(default=0.5, gt=0)
    roamer_steps: int = Field(default=900, ge=2)
    goal_views: int = Field(default=5, ge=1)
    success_radius: float = Field(default=1.0, gt=0)


class DecoderConfig(_Strict):
    tau_x: float = Field(default=20.0, gt=0)
    tau_y: float = Field(default=6.0, gt=0)
    block_size: int = Field(default=8, ge=4)
    search_radius: int = Field(default=34, ge=1)
    search_radius_y: int = Field(default=6, ge=0)
    patch_size: int = Field(default=9, ge=3)
    max_corners: int = Field(default=64, ge=4)
    consistency_tolerance: Optional[int] = Field(default=2, ge=0)

    def to_params(self, kind: DecoderKind = DecoderKind.FLOW) -> DecoderParams:
        return DecoderParams(
            tau_x=self.tau_x,
            tau_y=self.tau_y,
            kind=kind,
            block_size=self.block_size,
            search_radius=self.search_radius,
            search_radius_y=self.search_radius_y,
            patch_size=self.patch_size,
            max_corners=self.max_corners,
            consistency_tolerance=self.consistency_tolerance
        )


class ModelConfig(_Strict):
    frame_height: int = Field(default=64, ge=16)
    frame_width: int = Field(default=64, ge=16)
    visual_dim: int = Field(default=64, ge=1)
    action_dim: int = Field(default=32, ge=1)
    hidden_dim: int = Field(default=128, ge=1)
    n_sa_layers: int = Field(default=2, ge=1)
    n_ca_layers: int = Field(default=2, ge=1)
    n_heads: int = Field(default=4, ge=1)
    context_stride: int = Field(default=8, ge=1)
    max_context_tokens: int = Field(default=256, ge=2)
    n_semantic_actions: int = 10
    # "hidden" feeds the Q and termination heads the updated hidden state alone
    q_head_input: Literal["fused", "hidden"] = "fused"
    seed: int = Field(default=0, ge=0)

    @field_validator("frame_height", "frame_width")
    @classmethod
    def _multiple_of_16(cls, v):
        if v % 16 != 0:
            raise ValueError(f"frame sides must be multiples of 16, got {v}")
        return v

    @field_validator("n_semantic_actions")
    @classmethod
    def _ten_actions(cls, v):
        if v != 10:
            raise ValueError("n_semantic_actions must be 10")
        return v

    @model_validator(mode="after")
    def _heads_divide_hidden(self):
        if self.hidden_dim % self.n_heads != 0:
            raise ValueError(f"hidden_dim {self.hidden_dim} must be divisible by n_heads {self.n_heads}")
        if self.visual_dim % 4 != 0:
            raise ValueError(f"visual_dim {self.visual_dim} must be divisible by 4")
        return self


class AblationFlags(_Strict):
    no_context: bool = False
    no_temporal: bool = False
    matching_decoder: bool = False


class TrainConfig(_Strict):
    gamma: float = Field(default=0.99, gt=0, lt=1)
    beta: float = Field(default=0.5, gt=0, le=1)
    lambda_a: float = Field(default=1.0, ge=0)
    lambda_d: float = Field(default=1.0, ge=0)
    lambda_q: float = Field(default=1.0, ge=0)
    lambda_t: float = Field(default=1.0, ge=0)
    batch_size: int = Field(default=26, ge=1)
    total_steps: int = Field(default=50_000, ge=1)
    target_sync_interval: int = Field(default=200, ge=1)
    checkpoint_interval: int = Field(default=1000, ge=1)
    log_interval: int = Field(default=100, ge=1)
    temporal_pairs: int = Field(default=16, ge=1)
    lr: float = Field(default=1e-4, gt=0)
    betas: Tuple[float, float] = (0.9, 0.95)
    weight_decay: float = Field(default=0.1, ge=0)
    eps: float = Field(default=1e-8, gt=0)
    seed: int = Field(default=0, ge=0)
    ablation: AblationFlags = Field(default_factory=AblationFlags)

    @field_validator("betas")
    @classmethod
    def _betas_in_range(cls, v):
        if not all(0 <= b < 1 for b in v):
            raise ValueError("betas must lie in [0, 1)")
        return v


class InferenceConfig(_Strict):
    beta: float = Field(default=0.5, gt=0, le=1)
    epsilon: float = Field(default=0.999, ge=0, le=1)
    stop_threshold: float = Field(default=0.9, gt=0, lt=1)
    max_steps: int = Field(default=500, ge=1)
    seed: int = Field(default=0, ge=0)


class SuiteConfig(_Strict):
    seeds: List[int] = Field(default_factory=lambda: [0, 1, 2], min_length=1)
    repeats: int = Field(default=10, ge=1)
    splits: List[Split] = Field(default_factory=lambda: [Split.UNSEEN_LAYOUT, Split.UNSEEN_ROOM], min_length=1)
    variants: List[Variant] = Field(default_factory=lambda: [Variant.FULL], min_length=1)


class ExperimentConfig(_Strict):
    seed: int = Field(default=0, ge=0)
    dataset_root: Optional[str] = None
    scenes: ScenePlan = Field(default_factory=ScenePlan)
    decoder: DecoderConfig = Field(default_factory=DecoderConfig)
    model: ModelConfig = Field(default_factory=ModelConfig)
    train: TrainConfig = Field(default_factory=TrainConfig)
    inference: InferenceConfig = Field(default_factory=InferenceConfig)
    suite: SuiteConfig = Field(default_factory=SuiteConfig)


def parse_override(text: str) -> Tuple[List[str], Any]:
    """Split ``a.b.c=value``; the value is JSON when it parses, else a string."""
    if "=" not in text:
        raise ValueError(f"Override '{text}' must look like key.path=value")
    key, raw = text.split("=", 1)
    path = [part for part in key.strip().split(".") if part]
    if not path:
        raise ValueError(f"Override '{text}' has an empty key")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return path, value


def apply_overrides(data: Dict[str, Any], overrides: List[str]) -> Dict[str, Any]:
    for text in overrides:
        path, value = parse_override(text)
        node = data
        for part in path[:-1]:
            child = node.get(part)
            if not isinstance(child, dict):
                child = {}
                node[part] = child
            node = child
        node[path[-1]] = value
    return data


def offending_keys(error: ValidationError) -> List[str]:
    return sorted({".".join(str(p) for p in item["loc"]) for item in error.errors()})


def load_experiment_config(path: Optional[str] = None, overrides: Optional[List[str]] = None) -> ExperimentConfig:
    """Read a JSON config (or defaults), apply overrides, validate.

    Raises:
        OSError: the config file cannot be read.
        ValueError: malformed JSON or override.
        ValidationError: schema violation.
    """
    data: Dict[str, Any] = {}
    if path:
        text = Path(path).read_text(encoding="utf-8")
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValueError(f"Config {path} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ValueError(f"Config {path} must hold a JSON object")
    apply_overrides(data, overrides or [])
    return ExperimentConfig.model_validate(data)


def dump_config(config: ExperimentConfig) -> str:
    return json.dumps(config.model_dump(mode="json"), indent=2, sort_keys=True) + "\n"
