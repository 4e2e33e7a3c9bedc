"""Text condition: parse color/object pairs and localize objects on the grid.

Localization slides an n x n cell window (stride one cell) over the gray
input, scores each placement by cosine similarity between the window's image
embedding and the object phrase's text embedding, spreads every placement
score over the cells it covers, then averages each cell by the number of
placements covering it.  The two best cells per query become hint points
carrying the parsed color.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np

from ..core import CellGrid, GrayImage, HintPoint, HintSet, HintSource
from .providers import EmbeddingProvider

WINDOW_CELLS = 3
TOP_CELLS_PER_QUERY = 2

# Words ignored when collecting the object phrase after a color word.
_STOPWORDS = {
    "a", "an", "the", "and", "or", "with", "of", "on", "in", "at",
    "is", "are", "was", "were", "to", "for", "by", "this", "that",
    "some", "very", "there",
}


@lru_cache(maxsize=1)
def color_table() -> dict[str, tuple[float, float, float]]:
    """Named-color table (extended CSS set, 140 entries), name -> rgb."""
    text = resources.files("unicolor.conditions").joinpath("data/css_colors.json").read_text()
    raw = json.loads(text)
    return {name: tuple(rgb) for name, rgb in raw.items()}


def _lookup_color(word: str) -> tuple[float, float, float] | None:
    table = color_table()
    return table.get(word.replace("grey", "gray"))


@dataclass(frozen=True)
class TextQuery:
    object_phrase: str
    color_name: str
    color_rgb: tuple[float, float, float]

    def __post_init__(self):
        if not self.object_phrase:
            raise ValueError("object phrase must be non-empty")
        if _lookup_color(self.color_name) is None:
            raise ValueError(f"unknown color name: {self.color_name!r}")


@dataclass(frozen=True)
class ParseResult:
    queries: tuple[TextQuery, ...]
    diagnostic: str | None = None


def parse_color_text(prompt: str) -> ParseResult:
    """Extract adjacent "<color> <object phrase>" pairs from a prompt.

    Two-word colors are recognized when their joined form is in the table
    ("light blue" -> "lightblue").  When nothing parses, the result carries a
    diagnostic for the caller to surface.
    """
    if not prompt.strip():
        raise ValueError("prompt must be non-empty")
    tokens = re.findall(r"[a-zA-Z]+", prompt.lower())
    queries: list[TextQuery] = []
    i = 0
    while i < len(tokens):
        color_name = None
        consumed = 0
        if i + 1 < len(tokens):
            joined = tokens[i] + tokens[i + 1]
            if _lookup_color(joined) is not None:
                color_name, consumed = joined, 2
        if color_name is None and _lookup_color(tokens[i]) is not None:
            color_name, consumed = tokens[i], 1
        if color_name is None:
            i += 1
            continue
        j = i + consumed
        phrase: list[str] = []
        while j < len(tokens):
            word = tokens[j]
            if word in _STOPWORDS or _lookup_color(word) is not None:
                break
            phrase.append(word)
            j += 1
        if phrase:
            rgb = _lookup_color(color_name)
            queries.append(TextQuery(" ".join(phrase), color_name.replace("grey", "gray"), rgb))
            i = j
        else:
            i += consumed
    if not queries:
        return ParseResult((), f"no color/object pair found in prompt: {prompt!r}")
    return ParseResult(tuple(queries))


def query_score_map(
    gray: GrayImage,
    query: TextQuery,
    provider: EmbeddingProvider,
    grid: CellGrid,
    window: int = WINDOW_CELLS,
) -> np.ndarray:
    """Per-cell average of the window scores covering each cell."""
    if grid.rows < window or grid.cols < window:
        raise ValueError(
            f"grid {grid.rows}x{grid.cols} smaller than the {window}x{window} window"
        )
    d = grid.cell_size
    text_vec = provider.embed_text(query.object_phrase)
    accum = np.zeros((grid.rows, grid.cols))
    count = np.zeros((grid.rows, grid.cols))
    for r0 in range(grid.rows - window + 1):
        for c0 in range(grid.cols - window + 1):
            patch = GrayImage(
                gray.luma[r0 * d : (r0 + window) * d, c0 * d : (c0 + window) * d]
            )
            score = float(np.dot(provider.embed_image_patch(patch), text_vec))
            accum[r0 : r0 + window, c0 : c0 + window] += score
            count[r0 : r0 + window, c0 : c0 + window] += 1
    return accum / count


def top_cells(score_map: np.ndarray, k: int) -> list[tuple[int, int]]:
    """k best cells, ties broken in row-major order."""
    flat = score_map.reshape(-1)
    order = np.argsort(-flat, kind="stable")[:k]
    cols = score_map.shape[1]
    return [(int(idx) // cols, int(idx) % cols) for idx in order]


def text_to_hints(
    gray: GrayImage,
    queries: list[TextQuery],
    provider: EmbeddingProvider,
    grid: CellGrid,
    window: int = WINDOW_CELLS,
) -> HintSet:
    """Top-2 cells per query become hints; earlier queries win collisions."""
    if not queries:
        return HintSet.empty(grid)
    chosen: dict[tuple[int, int], HintPoint] = {}
    for query in queries:
        scores = query_score_map(gray, query, provider, grid, window)
        for row, col in top_cells(scores, TOP_CELLS_PER_QUERY):
            if (row, col) not in chosen:
                chosen[(row, col)] = HintPoint(row, col, query.color_rgb, HintSource.TEXT)
    return HintSet(grid, tuple(chosen[c] for c in sorted(chosen)))
