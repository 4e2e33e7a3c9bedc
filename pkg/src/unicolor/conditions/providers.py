"""Pluggable backends for exemplar matching and text-image embedding.

Both provider interfaces are deliberately small so that pretrained backbones
can be dropped in, while the bundled defaults keep the pipeline fully
self-contained and deterministic:

* ``PatchCorrespondenceProvider`` matches d x d luminance patches by
  normalized cross-correlation.  Its confidence scale is (1 + ncc) / 2,
  i.e. 1.0 for a perfect positive correlation and 0.5 for uncorrelated
  patches; thresholds must be chosen against that scale.
* ``HashEmbeddingProvider`` is a deterministic stand-in for a joint
  text-image encoder, keyed by content hash.  It is only meaningful for
  tests and demos.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Protocol

import numpy as np
from PIL import Image

from ..core import CellGrid, ColorImage, GrayImage, to_grayscale


class HintConversionError(RuntimeError):
    """A condition could not be converted into hint points."""


@dataclass(frozen=True)
class CorrespondenceResult:
    """Reference warped into the gray input's geometry plus per-pixel confidence."""

    warped: ColorImage
    confidence: np.ndarray

    def __post_init__(self):
        conf = np.asarray(self.confidence, dtype=np.float64)
        if conf.shape != (self.warped.height, self.warped.width):
            raise ValueError("confidence shape must match warped image")
        if not np.isfinite(conf).all() or conf.min() < 0.0 or conf.max() > 1.0:
            raise ValueError("confidence values must be in [0, 1]")
        conf = conf.copy()
        conf.flags.writeable = False
        object.__setattr__(self, "confidence", conf)


class CorrespondenceProvider(Protocol):
    def match(self, gray: GrayImage, ref: ColorImage) -> CorrespondenceResult: ...


class EmbeddingProvider(Protocol):
    def embed_image_patch(self, patch: GrayImage | ColorImage) -> np.ndarray: ...

    def embed_text(self, text: str) -> np.ndarray: ...


def resize_color(image: ColorImage, height: int, width: int) -> ColorImage:
    """Bilinear resize; used to bring references into the input's geometry."""
    arr = np.clip(np.round(image.rgb * 255.0), 0, 255).astype(np.uint8)
    resized = Image.fromarray(arr).resize((width, height), Image.BILINEAR)
    return ColorImage(np.asarray(resized, dtype=np.float64) / 255.0)


class IdentityCorrespondenceProvider:
    """Warp = reference resized to the input, confidence 1 everywhere."""

    def match(self, gray: GrayImage, ref: ColorImage) -> CorrespondenceResult:
        warped = resize_color(ref, gray.height, gray.width)
        return CorrespondenceResult(warped, np.ones((gray.height, gray.width)))


class PatchCorrespondenceProvider:
    """Luminance-patch NCC matcher over cell-aligned patches.

    For every d x d cell of the gray input, the best-correlating d x d cell of
    the reference is found by normalized cross-correlation of luminance
    patches; that reference patch is copied into the warped image and the
    cell's confidence is set to (1 + ncc) / 2.  Constant patches have no
    defined correlation and score 0 (confidence 0.5).
    """

    def __init__(self, cell_size: int):
        if cell_size < 2:
            raise ValueError("cell_size must be >= 2")
        self.cell_size = cell_size

    def _patches(self, arr: np.ndarray) -> np.ndarray:
        d = self.cell_size
        rows, cols = arr.shape[0] // d, arr.shape[1] // d
        return (
            arr[: rows * d, : cols * d]
            .reshape(rows, d, cols, d)
            .transpose(0, 2, 1, 3)
            .reshape(rows * cols, d * d)
        )

    def match(self, gray: GrayImage, ref: ColorImage) -> CorrespondenceResult:
        d = self.cell_size
        if gray.height % d or gray.width % d:
            raise HintConversionError("gray input is not a multiple of the cell size")
        if ref.height < d or ref.width < d:
            raise HintConversionError("reference smaller than one cell")
        grid = CellGrid.for_image(gray.height, gray.width, d)

        gray_patches = self._patches(gray.luma)
        ref_gray = to_grayscale(ref)
        ref_patches = self._patches(ref_gray.luma)

        def normalize(p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
            centered = p - p.mean(axis=1, keepdims=True)
            norms = np.linalg.norm(centered, axis=1, keepdims=True)
            ok = norms[:, 0] > 1e-12
            safe = np.where(norms > 1e-12, norms, 1.0)
            return centered / safe, ok

        gq, g_ok = normalize(gray_patches)
        rq, r_ok = normalize(ref_patches)
        ncc = gq @ rq.T
        ncc[~g_ok, :] = 0.0
        ncc[:, ~r_ok] = 0.0

        best = np.argmax(ncc, axis=1)
        best_ncc = ncc[np.arange(ncc.shape[0]), best]

        ref_rows = ref.height // d
        ref_cols = ref.width // d
        warped = np.zeros((gray.height, gray.width, 3))
        confidence = np.zeros((gray.height, gray.width))
        for idx in range(grid.num_cells):
            row, col = grid.unflatten(idx)
            rr, rc = divmod(int(best[idx]), ref_cols)
            assert rr < ref_rows
            patch = ref.rgb[rr * d : (rr + 1) * d, rc * d : (rc + 1) * d]
            rs, cs = grid.cell_slices(row, col)
            warped[rs, cs] = patch
            confidence[rs, cs] = 0.5 * (1.0 + best_ncc[idx])
        return CorrespondenceResult(ColorImage(warped), np.clip(confidence, 0.0, 1.0))


def _unit(v: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(v)
    return v / norm if norm > 0 else v


class HashEmbeddingProvider:
    """Deterministic embedding stub keyed by content hash.

    Unrelated inputs map to near-orthogonal unit vectors, so it exercises the
    scoring machinery without any pretrained weights.  Real deployments wrap a
    joint text-image encoder behind the same interface.
    """

    def __init__(self, dim: int = 64):
        self.dim = dim

    def _from_key(self, key: bytes) -> np.ndarray:
        digest = hashlib.sha256(key).digest()
        seed = int.from_bytes(digest[:8], "little")
        rng = np.random.default_rng(seed)
        return _unit(rng.standard_normal(self.dim))

    def embed_image_patch(self, patch: GrayImage | ColorImage) -> np.ndarray:
        arr = patch.rgb if isinstance(patch, ColorImage) else patch.luma
        quantized = np.round(arr * 255.0).astype(np.uint8)
        return self._from_key(b"img:" + quantized.tobytes())

    def embed_text(self, text: str) -> np.ndarray:
        return self._from_key(b"txt:" + text.encode("utf-8"))
