"""Stage-2 representation learner: quantized chroma, continuous gray."""

from .model import (
    ChromaVqgan,
    PatchDiscriminator,
    VectorQuantizer,
    VqganConfig,
    build_model,
    swap_color_source,
)
from .quantize import MASK_TOKEN, Codebook, FeatureMap, TokenGrid, detokenize, nearest_entries, tokenize
from .train import (
    TrainingDiverged,
    VqganTrainRecord,
    heldout_psnr,
    load_vqgan,
    save_vqgan_model,
    train_vqgan,
)

__all__ = [
    "ChromaVqgan",
    "Codebook",
    "FeatureMap",
    "MASK_TOKEN",
    "PatchDiscriminator",
    "TokenGrid",
    "TrainingDiverged",
    "VectorQuantizer",
    "VqganConfig",
    "VqganTrainRecord",
    "build_model",
    "detokenize",
    "heldout_psnr",
    "load_vqgan",
    "nearest_entries",
    "save_vqgan_model",
    "swap_color_source",
    "tokenize",
    "train_vqgan",
]
