"""Training-hint synthesis from superpixel dominant colors.

Ground-truth hints for training come from the image itself: SLIC superpixels
are painted with their mean color, and each selected cell takes the color of
the superpixel covering most of its pixels.  The dominant color avoids the
vague mixtures a plain cell mean produces on region boundaries.
"""

from __future__ import annotations

import numpy as np
from skimage.segmentation import slic

from ..core import CellGrid, ColorImage, HintPoint, HintSet, HintSource

DEFAULT_COMPACTNESS = 10.0
MAX_TRAINING_HINTS = 16
CELLS_PER_SUPERPIXEL = 4


def superpixel_labels(
    image: ColorImage,
    n_segments: int | None = None,
    compactness: float = DEFAULT_COMPACTNESS,
) -> np.ndarray:
    """SLIC label map, labels contiguous from 0."""
    if n_segments is None:
        n_segments = max(1, (image.height * image.width) // (4 * CELLS_PER_SUPERPIXEL**2))
    labels = slic(
        image.rgb,
        n_segments=n_segments,
        compactness=compactness,
        start_label=0,
        channel_axis=2,
    )
    # slic may skip label ids; compact them so bincount stays dense
    _, dense = np.unique(labels, return_inverse=True)
    return dense.reshape(labels.shape)


def label_mean_colors(image: ColorImage, labels: np.ndarray) -> np.ndarray:
    """(num_labels, 3) mean RGB per superpixel."""
    num = int(labels.max()) + 1
    flat = labels.reshape(-1)
    counts = np.bincount(flat, minlength=num).astype(np.float64)
    means = np.zeros((num, 3))
    for c in range(3):
        means[:, c] = np.bincount(flat, weights=image.rgb[..., c].reshape(-1), minlength=num)
    return means / counts[:, None]


def superpixel_image(
    image: ColorImage,
    n_segments: int | None = None,
    compactness: float = DEFAULT_COMPACTNESS,
) -> ColorImage:
    """The image repainted with per-superpixel mean colors."""
    labels = superpixel_labels(image, n_segments, compactness)
    means = label_mean_colors(image, labels)
    return ColorImage(np.clip(means[labels], 0.0, 1.0))


def dominant_cell_color(
    labels: np.ndarray, means: np.ndarray, grid: CellGrid, row: int, col: int
) -> tuple[float, float, float]:
    """Mean color of the superpixel covering the most pixels of the cell."""
    rs, cs = grid.cell_slices(row, col)
    cell_labels = labels[rs, cs].reshape(-1)
    counts = np.bincount(cell_labels)
    winner = int(np.argmax(counts))  # ties -> lowest label id
    return tuple(float(np.clip(v, 0.0, 1.0)) for v in means[winner])


def hint_colors_for_cells(
    image: ColorImage,
    grid: CellGrid,
    cells: list[tuple[int, int]],
    n_segments: int | None = None,
    compactness: float = DEFAULT_COMPACTNESS,
) -> list[tuple[float, float, float]]:
    """Dominant superpixel color for each requested cell."""
    if n_segments is None:
        n_segments = max(1, grid.num_cells // CELLS_PER_SUPERPIXEL)
    labels = superpixel_labels(image, n_segments, compactness)
    means = label_mean_colors(image, labels)
    return [dominant_cell_color(labels, means, grid, r, c) for r, c in cells]


def synthesize_training_hints(
    image: ColorImage,
    grid: CellGrid,
    rng: np.random.Generator,
    max_hints: int = MAX_TRAINING_HINTS,
    n_segments: int | None = None,
    compactness: float = DEFAULT_COMPACTNESS,
) -> HintSet:
    """Draw 1..max_hints distinct cells and color them by dominant superpixel color."""
    if (image.height, image.width) != (grid.height, grid.width):
        raise ValueError("image does not match grid")
    count = int(rng.integers(1, max_hints + 1))
    count = min(count, grid.num_cells)
    flat = rng.choice(grid.num_cells, size=count, replace=False)
    cells = [grid.unflatten(int(i)) for i in flat]
    colors = hint_colors_for_cells(image, grid, cells, n_segments, compactness)
    points = tuple(
        HintPoint(r, c, color, HintSource.MANUAL) for (r, c), color in zip(cells, colors)
    )
    return HintSet(grid, points)
