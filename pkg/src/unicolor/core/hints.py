"""Hint points: the unified condition representation.

Every condition modality (stroke, exemplar, text, manual clicks) reduces to a
set of grid cells annotated with a target RGB color and the modality that
produced it.  A ``HintSet`` holds at most one hint per cell.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

from .images import CellGrid


class HintSource(str, Enum):
    STROKE = "stroke"
    TEXT = "text"
    EXEMPLAR = "exemplar"
    MANUAL = "manual"


@dataclass(frozen=True)
class HintPoint:
    """A single cell with an assigned color and source modality."""

    row: int
    col: int
    color: tuple[float, float, float]
    source: HintSource

    def __post_init__(self):
        color = tuple(float(c) for c in self.color)
        if len(color) != 3 or any(not (0.0 <= c <= 1.0) for c in color):
            raise ValueError(f"hint color must be 3 values in [0, 1], got {self.color}")
        object.__setattr__(self, "color", color)
        object.__setattr__(self, "source", HintSource(self.source))


@dataclass(frozen=True)
class HintSet:
    """A grid plus hint points, at most one per cell."""

    grid: CellGrid
    points: tuple[HintPoint, ...]

    def __post_init__(self):
        points = tuple(self.points)
        seen: set[tuple[int, int]] = set()
        for p in points:
            if not (0 <= p.row < self.grid.rows and 0 <= p.col < self.grid.cols):
                raise ValueError(f"hint at ({p.row}, {p.col}) outside grid")
            if (p.row, p.col) in seen:
                raise ValueError(f"duplicate hint at cell ({p.row}, {p.col})")
            seen.add((p.row, p.col))
        object.__setattr__(self, "points", points)

    @classmethod
    def empty(cls, grid: CellGrid) -> "HintSet":
        return cls(grid, ())

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def at(self, row: int, col: int) -> HintPoint | None:
        for p in self.points:
            if p.row == row and p.col == col:
                return p
        return None

    def cells(self) -> set[tuple[int, int]]:
        return {(p.row, p.col) for p in self.points}

    def to_dict(self) -> dict:
        return {
            "grid": {
                "cell_size": self.grid.cell_size,
                "rows": self.grid.rows,
                "cols": self.grid.cols,
            },
            "hints": [
                {
                    "row": p.row,
                    "col": p.col,
                    "rgb": list(p.color),
                    "source": p.source.value,
                }
                for p in self.points
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, doc: dict) -> "HintSet":
        g = doc["grid"]
        grid = CellGrid(int(g["cell_size"]), int(g["rows"]), int(g["cols"]))
        points = tuple(
            HintPoint(
                int(h["row"]),
                int(h["col"]),
                tuple(float(v) for v in h["rgb"]),
                HintSource(h["source"]),
            )
            for h in doc["hints"]
        )
        return cls(grid, points)

    @classmethod
    def from_json(cls, text: str) -> "HintSet":
        return cls.from_dict(json.loads(text))
