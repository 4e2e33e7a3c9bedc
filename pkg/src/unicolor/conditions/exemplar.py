"""Exemplar condition: keep confidently-matched cells of the warped reference.

The provider warps the reference into the gray input's geometry together with
a per-pixel confidence map.  Cells whose mean confidence strictly exceeds the
threshold become hints colored with the cell's mean warped color; everything
else is discarded so mismatches do not inject noise.
"""

from __future__ import annotations

from ..core import CellGrid, ColorImage, GrayImage, HintPoint, HintSet, HintSource, cell_means
from .providers import CorrespondenceProvider, HintConversionError

CONFIDENCE_THRESHOLD = 0.23


def exemplar_to_hints(
    gray: GrayImage,
    ref: ColorImage,
    provider: CorrespondenceProvider,
    grid: CellGrid,
    threshold: float = CONFIDENCE_THRESHOLD,
) -> HintSet:
    if (gray.height, gray.width) != (grid.height, grid.width):
        raise ValueError("gray image does not match grid")
    try:
        result = provider.match(gray, ref)
    except HintConversionError:
        raise
    except Exception as exc:
        raise HintConversionError(f"correspondence provider failed: {exc}") from exc
    if (result.warped.height, result.warped.width) != (gray.height, gray.width):
        raise HintConversionError("provider returned warped image of wrong size")

    mean_conf = cell_means(result.confidence, grid)
    mean_color = cell_means(result.warped.rgb, grid)
    points = []
    for row in range(grid.rows):
        for col in range(grid.cols):
            if mean_conf[row, col] > threshold:
                color = tuple(float(c) for c in mean_color[row, col])
                points.append(HintPoint(row, col, color, HintSource.EXEMPLAR))
    return HintSet(grid, tuple(points))
