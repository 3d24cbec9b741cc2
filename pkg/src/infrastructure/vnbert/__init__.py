from .model import VNBert, ContextState, DecisionOutputs, build_model, clone_model, context_indices, context_token_count

__all__ = [
    "VNBert", "ContextState", "DecisionOutputs", "build_model", "clone_model",
    "context_indices", "context_token_count",
]
