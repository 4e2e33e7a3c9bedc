"""Dataset ingestion, augmentation and the procedural desk-scale scenes.

Real folders follow ``<root>/{train,val}/*.png``.  Ingestion resizes, random
crops and optionally flips each image; the whole stream is a pure function of
the dataset seed.  The procedural generator paints geometric regions in a
small fixed palette and modulates them with a smooth random luminance field,
so chroma identity and structural shading are carried by different factors.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np
from PIL import Image

from ..core import ColorImage, save_png

logger = logging.getLogger(__name__)

# hues differ but luma is ~0.45 for all four, so gray alone cannot reveal the
# color identity and conditioning has to do the work
FOUR_COLOR_PALETTE: tuple[tuple[float, float, float], ...] = (
    (0.95, 0.28, 0.05),  # red-orange
    (0.18, 0.64, 0.18),  # green
    (0.40, 0.38, 0.95),  # blue
    (0.72, 0.25, 0.85),  # purple
)


@dataclass(frozen=True)
class DatasetSpec:
    root: Path
    split: str = "train"
    resize_to: int = 74
    crop_to: int = 64
    hflip: bool = True
    seed: int = 0
    cell_size: int | None = None  # validated against crop_to when known

    def __post_init__(self):
        object.__setattr__(self, "root", Path(self.root))
        if self.split not in ("train", "val"):
            raise ValueError(f"split must be train or val, got {self.split!r}")
        if self.crop_to > self.resize_to:
            raise ValueError("crop_to must be <= resize_to")
        if self.cell_size is not None and self.crop_to % self.cell_size:
            raise ValueError(
                f"crop_to {self.crop_to} is not a multiple of cell_size {self.cell_size}"
            )


def ingest(spec: DatasetSpec) -> Iterator[ColorImage]:
    """One deterministic augmented pass over the split's PNG files."""
    folder = spec.root / spec.split
    files = sorted(folder.glob("*.png"))
    if not files:
        raise FileNotFoundError(f"no PNG files under {folder}")
    rng = np.random.default_rng(spec.seed)
    for path in files:
        try:
            with Image.open(path) as img:
                rgb = img.convert("RGB")
        except Exception as exc:  # unreadable file: skip, keep the stream going
            logger.warning("skipping unreadable image %s: %s", path, exc)
            continue
        rgb = rgb.resize((spec.resize_to, spec.resize_to), Image.BILINEAR)
        arr = np.asarray(rgb, dtype=np.float64) / 255.0
        max_off = spec.resize_to - spec.crop_to
        top = int(rng.integers(0, max_off + 1))
        left = int(rng.integers(0, max_off + 1))
        arr = arr[top : top + spec.crop_to, left : left + spec.crop_to]
        if spec.hflip and rng.random() < 0.5:
            arr = arr[:, ::-1]
        yield ColorImage(arr)


def load_split(spec: DatasetSpec) -> list[ColorImage]:
    images = list(ingest(spec))
    if not images:
        raise FileNotFoundError(f"no readable images under {spec.root / spec.split}")
    return images


# ---- procedural scenes ------------------------------------------------------


def _smooth_field(rng: np.random.Generator, size: int, knots: int = 5) -> np.ndarray:
    """Random field in [0, 1] from bilinearly upsampled low-res noise."""
    coarse = rng.random((knots, knots))
    xs = np.linspace(0, knots - 1, size)
    i0 = np.clip(xs.astype(int), 0, knots - 2)
    f = xs - i0
    rows = coarse[i0] * (1 - f)[:, None] + coarse[i0 + 1] * f[:, None]
    field = rows[:, i0] * (1 - f)[None, :] + rows[:, i0 + 1] * f[None, :]
    lo, hi = field.min(), field.max()
    return (field - lo) / (hi - lo) if hi > lo else np.zeros_like(field)


def generate_scene(
    rng: np.random.Generator,
    size: int = 64,
    palette: Sequence[tuple[float, float, float]] = FOUR_COLOR_PALETTE,
    align: int = 8,
) -> ColorImage:
    """One scene: palette-colored regions under a smooth luminance field.

    Region edges are snapped to the ``align`` grid (the hint cell size) so a
    token grid can localize every color boundary; the near-equal palette luma
    means gray reveals shading but never the hue.
    """
    palette_arr = np.array(palette)
    base = np.empty((size, size, 3))
    base[:] = palette_arr[rng.integers(len(palette))]

    cells = size // align

    def span(lo_cells: int, hi_cells: int) -> tuple[int, int]:
        extent = int(rng.integers(lo_cells, hi_cells + 1))
        start = int(rng.integers(0, cells - extent + 1))
        return start * align, (start + extent) * align

    for _ in range(int(rng.integers(2, 5))):
        color = palette_arr[rng.integers(len(palette))]
        kind = rng.integers(3)
        if kind == 0:  # rectangle
            top, bottom = span(1, max(1, cells // 2))
            left, right = span(1, max(1, cells // 2))
            base[top:bottom, left:right] = color
        elif kind == 1:  # square blob
            side = int(rng.integers(1, max(2, cells // 2) + 1))
            top = int(rng.integers(0, cells - side + 1)) * align
            left = int(rng.integers(0, cells - side + 1)) * align
            base[top : top + side * align, left : left + side * align] = color
        else:  # stripe
            lo, hi = span(1, max(1, cells // 3))
            if rng.random() < 0.5:
                base[:, lo:hi] = color
            else:
                base[lo:hi, :] = color

    gradient = _smooth_field(rng, size, knots=3)
    texture = _smooth_field(rng, size, knots=7)
    luminance = 0.55 + 0.45 * np.clip(0.6 * gradient + 0.4 * texture, 0.0, 1.0)
    return ColorImage(np.clip(base * luminance[..., None], 0.0, 1.0))


def generate_dataset(
    count: int,
    size: int = 64,
    seed: int = 0,
    palette: Sequence[tuple[float, float, float]] = FOUR_COLOR_PALETTE,
    align: int = 8,
) -> list[ColorImage]:
    rng = np.random.default_rng(seed)
    return [generate_scene(rng, size, palette, align) for _ in range(count)]


def write_dataset(
    root,
    train_count: int,
    val_count: int,
    size: int = 64,
    seed: int = 0,
    palette: Sequence[tuple[float, float, float]] = FOUR_COLOR_PALETTE,
    align: int = 8,
) -> None:
    """Materialize a procedural dataset in the standard folder layout."""
    root = Path(root)
    rng = np.random.default_rng(seed)
    for split, count in (("train", train_count), ("val", val_count)):
        folder = root / split
        folder.mkdir(parents=True, exist_ok=True)
        for i in range(count):
            save_png(generate_scene(rng, size, palette, align), folder / f"{split}_{i:05d}.png")
