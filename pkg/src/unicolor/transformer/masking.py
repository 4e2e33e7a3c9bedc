"""Masked-cell sampling for the color-completion training objective.

Each draw masks either every cell (small probability, so the model also
learns to colorize from scratch) or a uniform count of cells at uniform
positions; hint cells are then a uniform-count subset of the masked region,
present with fixed probability.  Defaults scale the published 256-cell recipe
to an arbitrary sequence length: the minimum mask and maximum hint counts are
both L/16.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

FULL_MASK_PROB = 0.05
HINT_PROB = 0.70


def scaled_min_mask(length: int) -> int:
    return max(1, length // 16)


def scaled_max_hints(length: int) -> int:
    return max(1, length // 16)


@dataclass(frozen=True)
class MaskSpec:
    """Masked flat cell indices plus the hinted subset.

    ``full_mask`` records whether the draw came from the dedicated
    mask-everything branch (the uniform count can also land on L).
    """

    length: int
    masked_cells: tuple[int, ...]
    hint_cells: tuple[int, ...]
    full_mask: bool = False

    def __post_init__(self):
        masked = tuple(sorted(int(c) for c in self.masked_cells))
        hints = tuple(sorted(int(c) for c in self.hint_cells))
        if not masked:
            raise ValueError("at least one cell must be masked")
        if any(not (0 <= c < self.length) for c in masked):
            raise ValueError("masked cell out of range")
        if len(set(masked)) != len(masked):
            raise ValueError("duplicate masked cells")
        if not set(hints) <= set(masked):
            raise ValueError("hint cells must be a subset of masked cells")
        object.__setattr__(self, "masked_cells", masked)
        object.__setattr__(self, "hint_cells", hints)

    def mask_array(self) -> np.ndarray:
        out = np.zeros(self.length, dtype=bool)
        out[list(self.masked_cells)] = True
        return out

    def hint_array(self) -> np.ndarray:
        out = np.zeros(self.length, dtype=bool)
        if self.hint_cells:
            out[list(self.hint_cells)] = True
        return out


def sample_training_mask(
    length: int,
    rng: np.random.Generator,
    mask_min: int | None = None,
    hint_max: int | None = None,
    full_mask_prob: float = FULL_MASK_PROB,
    hint_prob: float = HINT_PROB,
) -> MaskSpec:
    """One training draw: mask count/positions, then hint count/positions."""
    mask_min = scaled_min_mask(length) if mask_min is None else mask_min
    hint_max = scaled_max_hints(length) if hint_max is None else hint_max
    if not (1 <= mask_min <= length):
        raise ValueError("mask_min must be in [1, length]")
    if hint_max > mask_min:
        raise ValueError("hint_max may not exceed mask_min (hints live inside the mask)")

    full = rng.random() < full_mask_prob
    if full:
        masked = np.arange(length)
    else:
        count = int(rng.integers(mask_min, length + 1))
        masked = rng.choice(length, size=count, replace=False)

    hints: np.ndarray = np.empty(0, dtype=np.int64)
    if rng.random() < hint_prob:
        k = int(rng.integers(1, hint_max + 1))
        hints = rng.choice(np.sort(masked), size=k, replace=False)
    return MaskSpec(length, tuple(masked.tolist()), tuple(hints.tolist()), full)
