"""UniColor: unified multi-modal image colorization.

Strokes, exemplars and text prompts are converted into a common hint-point
representation; a chroma-quantized autoencoder plus a masked transformer then
sample diverse colorizations conditioned on those hints.
"""

__version__ = "0.1.0"

from .core import (
    CellGrid,
    ColorImage,
    GrayImage,
    HintPoint,
    HintSet,
    HintSource,
    RegionMask,
    colorfulness,
    psnr,
    ssim,
    to_grayscale,
)
from .sampler import SampleResult, SamplerConfig, colorize, diverse_batch, recolorize

__all__ = [
    "CellGrid",
    "ColorImage",
    "GrayImage",
    "HintPoint",
    "HintSet",
    "HintSource",
    "RegionMask",
    "SampleResult",
    "SamplerConfig",
    "colorfulness",
    "colorize",
    "diverse_batch",
    "psnr",
    "recolorize",
    "ssim",
    "to_grayscale",
    "__version__",
]
