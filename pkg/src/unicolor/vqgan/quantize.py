"""Codebook quantization primitives shared by the networks and the sampler.

``tokenize`` maps each feature vector to the index of its nearest codebook
entry (Euclidean, ties to the lowest index); ``detokenize`` is the inverse
lookup.  Token grids use ``MASK_TOKEN`` (-1) as the sentinel for unknown
cells; detokenization refuses grids that still contain it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MASK_TOKEN = -1


@dataclass(frozen=True)
class Codebook:
    """N learnable code vectors of dimension code_dim."""

    entries: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] < 2:
            raise ValueError("codebook needs at least 2 entries of shape (N, C)")
        if not np.isfinite(arr).all():
            raise ValueError("codebook entries must be finite")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "entries", arr)

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    @property
    def code_dim(self) -> int:
        return self.entries.shape[1]


@dataclass(frozen=True)
class FeatureMap:
    """Continuous (rows, cols, channels) activations."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 3:
            raise ValueError(f"feature map must be (rows, cols, channels), got {arr.shape}")
        if not np.isfinite(arr).all():
            raise ValueError("feature values must be finite")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]

    @property
    def channels(self) -> int:
        return self.values.shape[2]


@dataclass(frozen=True)
class TokenGrid:
    """(rows, cols) codebook indices, MASK_TOKEN marking unknown cells."""

    indices: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.indices, dtype=np.int64)
        if arr.ndim != 2:
            raise ValueError(f"token grid must be 2-D, got shape {arr.shape}")
        if (arr < MASK_TOKEN).any():
            raise ValueError("token indices must be >= MASK_TOKEN")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "indices", arr)

    @property
    def rows(self) -> int:
        return self.indices.shape[0]

    @property
    def cols(self) -> int:
        return self.indices.shape[1]

    @property
    def has_mask(self) -> bool:
        return bool((self.indices == MASK_TOKEN).any())

    @classmethod
    def all_masked(cls, rows: int, cols: int) -> "TokenGrid":
        return cls(np.full((rows, cols), MASK_TOKEN, dtype=np.int64))


def nearest_entries(features: np.ndarray, codebook: Codebook) -> np.ndarray:
    """Index of the nearest codebook entry per row of (M, C) features."""
    deltas = features[:, None, :] - codebook.entries[None, :, :]
    dists = np.einsum("mnc,mnc->mn", deltas, deltas)
    return np.argmin(dists, axis=1).astype(np.int64)  # ties -> lowest index


def tokenize(features: FeatureMap, codebook: Codebook) -> TokenGrid:
    """Nearest-neighbor quantization of every cell's feature vector."""
    if features.channels != codebook.code_dim:
        raise ValueError(
            f"feature dim {features.channels} != codebook dim {codebook.code_dim}"
        )
    flat = features.values.reshape(-1, features.channels)
    indices = nearest_entries(flat, codebook)
    return TokenGrid(indices.reshape(features.rows, features.cols))


def detokenize(tokens: TokenGrid, codebook: Codebook) -> FeatureMap:
    """Replace each index with its codebook vector; refuses masked grids."""
    if tokens.has_mask:
        raise ValueError("cannot detokenize a grid containing MASK tokens")
    if (tokens.indices >= codebook.size).any():
        raise ValueError("token index out of codebook range")
    return FeatureMap(codebook.entries[tokens.indices])
