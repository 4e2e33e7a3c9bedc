"""Image containers and cell-grid geometry.

Images are numpy arrays wrapped in small frozen dataclasses: ``ColorImage``
holds (H, W, 3) RGB values in [0, 1], ``GrayImage`` holds (H, W) luma in
[0, 1].  Arrays are copied and marked read-only on construction so instances
can be shared freely across threads.

The cell grid partitions an image into d x d pixel blocks; cells are the
spatial unit for hints, color tokens and region masks.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from PIL import Image


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(arr, dtype=np.float64)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class GrayImage:
    """Single-channel image, values in [0, 1], shape (H, W)."""

    luma: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.luma, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"gray image must be 2-D, got shape {arr.shape}")
        if not np.isfinite(arr).all() or arr.min() < 0.0 or arr.max() > 1.0:
            raise ValueError("gray values must be finite and in [0, 1]")
        object.__setattr__(self, "luma", _freeze(arr))

    @property
    def height(self) -> int:
        return self.luma.shape[0]

    @property
    def width(self) -> int:
        return self.luma.shape[1]


@dataclass(frozen=True)
class ColorImage:
    """Three-channel RGB image, values in [0, 1], shape (H, W, 3)."""

    rgb: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.rgb, dtype=np.float64)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise ValueError(f"color image must have shape (H, W, 3), got {arr.shape}")
        if not np.isfinite(arr).all() or arr.min() < 0.0 or arr.max() > 1.0:
            raise ValueError("rgb values must be finite and in [0, 1]")
        object.__setattr__(self, "rgb", _freeze(arr))

    @property
    def height(self) -> int:
        return self.rgb.shape[0]

    @property
    def width(self) -> int:
        return self.rgb.shape[1]


# Rec. 601 luma weights; to_grayscale is the only place color collapses to luma.
LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])


def to_grayscale(image: ColorImage) -> GrayImage:
    """Collapse RGB to luminance with the standard Rec. 601 weights."""
    luma = image.rgb @ LUMA_WEIGHTS
    return GrayImage(np.clip(luma, 0.0, 1.0))


@dataclass(frozen=True)
class CellGrid:
    """Partition of an image into rows x cols cells of cell_size pixels."""

    cell_size: int
    rows: int
    cols: int

    def __post_init__(self):
        if self.cell_size < 2:
            raise ValueError("cell_size must be >= 2")
        if self.rows < 1 or self.cols < 1:
            raise ValueError("grid must have at least one cell")

    @classmethod
    def for_image(cls, height: int, width: int, cell_size: int) -> "CellGrid":
        if height % cell_size or width % cell_size:
            raise ValueError(
                f"image {width}x{height} is not a multiple of cell_size {cell_size}"
            )
        return cls(cell_size, height // cell_size, width // cell_size)

    @property
    def height(self) -> int:
        return self.rows * self.cell_size

    @property
    def width(self) -> int:
        return self.cols * self.cell_size

    @property
    def num_cells(self) -> int:
        return self.rows * self.cols

    def cell_of_pixel(self, x: int, y: int) -> tuple[int, int]:
        """Map a pixel coordinate to its (row, col) cell."""
        if not (0 <= x < self.width and 0 <= y < self.height):
            raise ValueError(
                f"pixel ({x}, {y}) outside {self.width}x{self.height} image"
            )
        return y // self.cell_size, x // self.cell_size

    def cell_slices(self, row: int, col: int) -> tuple[slice, slice]:
        """Pixel-index slices (rows, cols) covered by the cell."""
        if not (0 <= row < self.rows and 0 <= col < self.cols):
            raise ValueError(f"cell ({row}, {col}) outside {self.rows}x{self.cols} grid")
        d = self.cell_size
        return slice(row * d, (row + 1) * d), slice(col * d, (col + 1) * d)

    def flat_index(self, row: int, col: int) -> int:
        return row * self.cols + col

    def unflatten(self, index: int) -> tuple[int, int]:
        return divmod(index, self.cols)


def cell_of_pixel(grid: CellGrid, x: int, y: int) -> tuple[int, int]:
    return grid.cell_of_pixel(x, y)


def cell_means(pixels: np.ndarray, grid: CellGrid) -> np.ndarray:
    """Per-cell mean of a (H, W) or (H, W, C) array; returns (rows, cols[, C])."""
    d = grid.cell_size
    if pixels.shape[0] != grid.height or pixels.shape[1] != grid.width:
        raise ValueError("array shape does not match grid")
    if pixels.ndim == 2:
        blocks = pixels.reshape(grid.rows, d, grid.cols, d)
        return blocks.mean(axis=(1, 3))
    blocks = pixels.reshape(grid.rows, d, grid.cols, d, pixels.shape[2])
    return blocks.mean(axis=(1, 3))


@dataclass(frozen=True)
class RegionMask:
    """Boolean cell selection over a grid."""

    grid: CellGrid
    selected: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.asarray(self.selected, dtype=bool)
        if arr.shape != (self.grid.rows, self.grid.cols):
            raise ValueError(
                f"mask shape {arr.shape} does not match grid "
                f"{(self.grid.rows, self.grid.cols)}"
            )
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "selected", arr)

    @classmethod
    def from_cells(cls, grid: CellGrid, cells) -> "RegionMask":
        mask = np.zeros((grid.rows, grid.cols), dtype=bool)
        for row, col in cells:
            if not (0 <= row < grid.rows and 0 <= col < grid.cols):
                raise ValueError(f"cell ({row}, {col}) outside grid")
            mask[row, col] = True
        return cls(grid, mask)

    @classmethod
    def full(cls, grid: CellGrid) -> "RegionMask":
        return cls(grid, np.ones((grid.rows, grid.cols), dtype=bool))

    @property
    def num_selected(self) -> int:
        return int(self.selected.sum())

    def cells(self) -> list[tuple[int, int]]:
        """Selected cells in row-major order."""
        rows, cols = np.nonzero(self.selected)
        return list(zip(rows.tolist(), cols.tolist()))


def center_crop_to_multiple(image: ColorImage | GrayImage, cell_size: int):
    """Center-crop so both dimensions are multiples of cell_size.

    Images with ragged edges are cropped at ingestion rather than resampled.
    """
    h, w = image.height, image.width
    new_h = (h // cell_size) * cell_size
    new_w = (w // cell_size) * cell_size
    if new_h < cell_size or new_w < cell_size:
        raise ValueError(f"image {w}x{h} smaller than one {cell_size}px cell")
    top = (h - new_h) // 2
    left = (w - new_w) // 2
    if isinstance(image, GrayImage):
        return GrayImage(image.luma[top : top + new_h, left : left + new_w])
    return ColorImage(image.rgb[top : top + new_h, left : left + new_w])


def load_color_png(path) -> ColorImage:
    with Image.open(path) as img:
        arr = np.asarray(img.convert("RGB"), dtype=np.float64) / 255.0
    return ColorImage(arr)


def load_gray_png(path) -> GrayImage:
    with Image.open(path) as img:
        arr = np.asarray(img.convert("L"), dtype=np.float64) / 255.0
    return GrayImage(arr)


def to_uint8(image: ColorImage | GrayImage) -> np.ndarray:
    arr = image.rgb if isinstance(image, ColorImage) else image.luma
    return np.clip(np.round(arr * 255.0), 0, 255).astype(np.uint8)


def save_png(image: ColorImage | GrayImage, path) -> None:
    Image.fromarray(to_uint8(image)).save(path, format="PNG")


def png_bytes(image: ColorImage | GrayImage) -> bytes:
    import io

    buf = io.BytesIO()
    Image.fromarray(to_uint8(image)).save(buf, format="PNG")
    return buf.getvalue()


def color_from_png_bytes(data: bytes) -> ColorImage:
    import io

    with Image.open(io.BytesIO(data)) as img:
        arr = np.asarray(img.convert("RGB"), dtype=np.float64) / 255.0
    return ColorImage(arr)


def gray_from_png_bytes(data: bytes) -> GrayImage:
    import io

    with Image.open(io.BytesIO(data)) as img:
        arr = np.asarray(img.convert("L"), dtype=np.float64) / 255.0
    return GrayImage(arr)
