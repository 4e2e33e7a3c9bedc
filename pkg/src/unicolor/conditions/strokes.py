"""Stroke condition: rasterize user strokes and keep well-covered cells.

A stroke is a polyline with a color and a brush width.  Rasterization stamps
a disk of radius width/2 (Euclidean) at every pixel of the 8-connected line
through the points.  A cell becomes a hint when the stroke covers strictly
more than 0.75*d of its pixels; later strokes overwrite earlier hints in the
same cell.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import CellGrid, HintPoint, HintSet, HintSource

COVERAGE_FACTOR = 0.75


@dataclass(frozen=True)
class Stroke:
    points: tuple[tuple[int, int], ...]
    color: tuple[float, float, float]
    width: int = 1

    def __post_init__(self):
        points = tuple((int(x), int(y)) for x, y in self.points)
        if not points:
            raise ValueError("stroke needs at least one point")
        if self.width < 1:
            raise ValueError("stroke width must be >= 1")
        color = tuple(float(c) for c in self.color)
        if len(color) != 3 or any(not (0.0 <= c <= 1.0) for c in color):
            raise ValueError("stroke color must be 3 values in [0, 1]")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "color", color)

    def to_dict(self) -> dict:
        return {
            "points": [[x, y] for x, y in self.points],
            "rgb": list(self.color),
            "width": self.width,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Stroke":
        return cls(
            points=tuple((int(p[0]), int(p[1])) for p in doc["points"]),
            color=tuple(float(v) for v in doc["rgb"]),
            width=int(doc.get("width", 1)),
        )


def _line_pixels(x0: int, y0: int, x1: int, y1: int):
    """8-connected Bresenham line from (x0, y0) to (x1, y1), inclusive."""
    dx = abs(x1 - x0)
    dy = -abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    x, y = x0, y0
    while True:
        yield x, y
        if x == x1 and y == y1:
            return
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x += sx
        if e2 <= dx:
            err += dx
            y += sy


def _disk_offsets(width: int) -> np.ndarray:
    radius = width / 2.0
    r_int = int(np.floor(radius))
    offs = [
        (dx, dy)
        for dy in range(-r_int, r_int + 1)
        for dx in range(-r_int, r_int + 1)
        if dx * dx + dy * dy <= radius * radius
    ]
    return np.array(offs, dtype=np.int64)


def rasterize_stroke(stroke: Stroke, height: int, width: int) -> np.ndarray:
    """Boolean (H, W) coverage mask of the stroke."""
    for x, y in stroke.points:
        if not (0 <= x < width and 0 <= y < height):
            raise ValueError(f"stroke point ({x}, {y}) outside {width}x{height} image")
    mask = np.zeros((height, width), dtype=bool)
    offsets = _disk_offsets(stroke.width)
    pts = list(stroke.points)
    segments = zip(pts, pts[1:]) if len(pts) > 1 else [(pts[0], pts[0])]
    for (x0, y0), (x1, y1) in segments:
        for x, y in _line_pixels(x0, y0, x1, y1):
            xs = x + offsets[:, 0]
            ys = y + offsets[:, 1]
            keep = (xs >= 0) & (xs < width) & (ys >= 0) & (ys < height)
            mask[ys[keep], xs[keep]] = True
    return mask


def cell_coverage(mask: np.ndarray, grid: CellGrid) -> np.ndarray:
    """Covered-pixel count per cell, shape (rows, cols)."""
    d = grid.cell_size
    return (
        mask.reshape(grid.rows, d, grid.cols, d).sum(axis=(1, 3)).astype(np.int64)
    )


def strokes_to_hints(strokes: list[Stroke], grid: CellGrid) -> HintSet:
    """Cells where a stroke covers > 0.75*d pixels become hints in its color."""
    threshold = COVERAGE_FACTOR * grid.cell_size
    chosen: dict[tuple[int, int], HintPoint] = {}
    for stroke in strokes:
        mask = rasterize_stroke(stroke, grid.height, grid.width)
        counts = cell_coverage(mask, grid)
        for row, col in zip(*np.nonzero(counts > threshold)):
            cell = (int(row), int(col))
            chosen[cell] = HintPoint(cell[0], cell[1], stroke.color, HintSource.STROKE)
    points = tuple(chosen[c] for c in sorted(chosen))
    return HintSet(grid, points)
