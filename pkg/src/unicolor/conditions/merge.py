"""Merging hint sets from several modalities under a priority order.

On a cell collision the hint whose source ranks higher in the priority order
wins; among equal-priority hints the earlier set wins.  The default order is
stroke > text > exemplar > manual and can be overridden explicitly.
"""

from __future__ import annotations

from typing import Sequence

from ..core import HintPoint, HintSet, HintSource

DEFAULT_PRIORITY: tuple[HintSource, ...] = (
    HintSource.STROKE,
    HintSource.TEXT,
    HintSource.EXEMPLAR,
    HintSource.MANUAL,
)


def merge_hints(
    sets: Sequence[HintSet],
    priority: Sequence[HintSource] = DEFAULT_PRIORITY,
) -> HintSet:
    if not sets:
        raise ValueError("nothing to merge")
    grid = sets[0].grid
    for s in sets[1:]:
        if s.grid != grid:
            raise ValueError("all hint sets must share one grid")
    rank = {source: i for i, source in enumerate(priority)}
    missing = {p.source for s in sets for p in s} - set(rank)
    if missing:
        raise ValueError(f"priority order does not cover sources: {missing}")

    chosen: dict[tuple[int, int], HintPoint] = {}
    for hint_set in sets:
        for point in hint_set:
            cell = (point.row, point.col)
            existing = chosen.get(cell)
            if existing is None or rank[point.source] < rank[existing.source]:
                chosen[cell] = point
    return HintSet(grid, tuple(chosen[c] for c in sorted(chosen)))
