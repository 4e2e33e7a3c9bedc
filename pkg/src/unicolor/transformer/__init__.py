"""Masked color-token model over hybrid gray/color/hint inputs."""

from .masking import (
    FULL_MASK_PROB,
    HINT_PROB,
    MaskSpec,
    sample_training_mask,
    scaled_max_hints,
    scaled_min_mask,
)
from .model import (
    HybridTransformer,
    TransformerConfig,
    assemble_input,
    build_transformer,
    forward_probs,
    hints_to_arrays,
    masked_ce_loss,
)
from .train import (
    PrecomputedSet,
    TransformerTrainRecord,
    hint_colors_to_tokens,
    load_transformer,
    masked_eval,
    precompute_features,
    save_transformer_model,
    train_transformer,
)

__all__ = [
    "FULL_MASK_PROB",
    "HINT_PROB",
    "HybridTransformer",
    "MaskSpec",
    "PrecomputedSet",
    "TransformerConfig",
    "TransformerTrainRecord",
    "assemble_input",
    "build_transformer",
    "forward_probs",
    "hint_colors_to_tokens",
    "hints_to_arrays",
    "load_transformer",
    "masked_ce_loss",
    "masked_eval",
    "precompute_features",
    "sample_training_mask",
    "save_transformer_model",
    "scaled_max_hints",
    "scaled_min_mask",
    "train_transformer",
]
