"""Domain types, color math, cell-grid geometry and reference metrics."""

from .hints import HintPoint, HintSet, HintSource
from .images import (
    CellGrid,
    ColorImage,
    GrayImage,
    RegionMask,
    cell_means,
    cell_of_pixel,
    center_crop_to_multiple,
    color_from_png_bytes,
    gray_from_png_bytes,
    load_color_png,
    load_gray_png,
    png_bytes,
    save_png,
    to_grayscale,
    to_uint8,
)
from .metrics import colorfulness, psnr, ssim

__all__ = [
    "CellGrid",
    "ColorImage",
    "GrayImage",
    "HintPoint",
    "HintSet",
    "HintSource",
    "RegionMask",
    "cell_means",
    "cell_of_pixel",
    "center_crop_to_multiple",
    "color_from_png_bytes",
    "colorfulness",
    "gray_from_png_bytes",
    "load_color_png",
    "load_gray_png",
    "png_bytes",
    "psnr",
    "save_png",
    "ssim",
    "to_grayscale",
    "to_uint8",
]
