from .tensor import (
    Tensor, backward, no_grad, is_grad_enabled, matmul, gelu, sigmoid, softplus, log, exp, tanh,
    softmax, log_softmax, layer_norm, embedding, concat, stack, SUPPORTED_OPS
)
from .nn import Module, Linear, LayerNorm, Embedding, MultiHeadAttention, multi_head_attention
from .optim import AdamW, OptimizerState, adamw_step
from .spectral import PowerIterationState, SpectralLinear, spectral_normalize

__all__ = [
    "Tensor", "backward", "no_grad", "is_grad_enabled", "matmul", "gelu", "sigmoid", "softplus",
    "log", "exp", "tanh", "softmax", "log_softmax", "layer_norm", "embedding", "concat", "stack",
    "SUPPORTED_OPS",
    "Module", "Linear", "LayerNorm", "Embedding", "MultiHeadAttention", "multi_head_attention",
    "AdamW", "OptimizerState", "adamw_step",
    "PowerIterationState", "SpectralLinear", "spectral_normalize",
]
