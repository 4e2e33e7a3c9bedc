"""Raster-scan autoregressive sampling of color tokens.

Cells are filled one at a time in row-major order.  At every step the full
hybrid sequence is re-assembled (hints stay injected at their cells
throughout the chain) and a token is drawn from the top-k renormalized
distribution at the current cell.  Recolorization masks only the requested
region, so tokens outside it are carried over bit-identically.  Each chain
has its own generator derived from (seed, chain index), making results
reproducible end to end.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np
import torch

from .core import (
    CellGrid,
    ColorImage,
    GrayImage,
    HintSet,
    RegionMask,
    save_png,
    to_grayscale,
)
from .transformer.model import HybridTransformer, hints_to_arrays
from .transformer.train import hint_colors_to_tokens
from .vqgan.model import ChromaVqgan
from .vqgan.quantize import MASK_TOKEN, TokenGrid

StepCallback = Callable[[int, int, tuple[int, ...]], None]
"""Called after each sampled cell with (cells_done, cells_total, visible_cells).

``visible_cells`` is the row-major tuple of color-half positions whose input
slot is not the MASK embedding at that step: previously filled tokens plus
persistently injected hint cells.
"""


@dataclass(frozen=True)
class SamplerConfig:
    top_k: int = 100
    temperature: float = 1.0
    num_samples: int = 1
    seed: int = 0
    hard_hint_tokens: bool = False

    def __post_init__(self):
        if self.top_k < 1:
            raise ValueError("top_k must be positive")
        if self.temperature <= 0:
            raise ValueError("temperature must be positive")
        if self.num_samples < 1:
            raise ValueError("num_samples must be positive")

    def to_dict(self) -> dict:
        return {
            "top_k": self.top_k,
            "temperature": self.temperature,
            "num_samples": self.num_samples,
            "seed": self.seed,
            "hard_hint_tokens": self.hard_hint_tokens,
        }


@dataclass
class SampleResult:
    images: list[ColorImage]
    token_grids: list[TokenGrid]
    log_probs: list[list[float]]
    chain_seeds: list[int]
    config: SamplerConfig
    diversity: float | None = None


def chain_seed(seed: int, chain: int) -> int:
    return int(np.random.SeedSequence([seed & 0xFFFFFFFF, chain]).generate_state(1)[0])


def _validate_pair(vqgan: ChromaVqgan, model: HybridTransformer) -> None:
    if model.cfg.codebook_size != vqgan.cfg.codebook_size:
        raise ValueError("transformer and tokenizer disagree on codebook size")
    if model.cfg.code_dim != vqgan.cfg.code_dim:
        raise ValueError("transformer and tokenizer disagree on gray feature width")


def _grid_for(vqgan: ChromaVqgan, model: HybridTransformer, height: int, width: int) -> CellGrid:
    grid = CellGrid.for_image(height, width, vqgan.cfg.d)
    if grid.num_cells != model.cfg.length:
        raise ValueError(
            f"image yields {grid.num_cells} cells but the model expects {model.cfg.length}"
        )
    return grid


def _sample_chain(
    model: HybridTransformer,
    base_tokens: np.ndarray,
    gray: np.ndarray,
    hint_mask: np.ndarray,
    hint_rgb: np.ndarray,
    hint_tokens: np.ndarray | None,
    positions: list[int],
    cfg: SamplerConfig,
    generator: torch.Generator,
    step_callback: StepCallback | None = None,
) -> tuple[np.ndarray, list[float]]:
    tokens = base_tokens.copy()
    gray_t = torch.from_numpy(gray).float()[None]
    hmask_t = torch.from_numpy(hint_mask)[None]
    hrgb_t = torch.from_numpy(hint_rgb).float()[None]
    htok_t = None if hint_tokens is None else torch.from_numpy(hint_tokens)[None]
    n = model.cfg.codebook_size
    k = min(cfg.top_k, n)
    log_probs: list[float] = []
    for done, pos in enumerate(positions):
        seq = model.assemble(torch.from_numpy(tokens)[None], gray_t, hmask_t, hrgb_t, htok_t)
        with torch.no_grad():
            logits = model(seq)[0, pos]
        values, candidates = torch.topk(logits / cfg.temperature, k)
        probs = torch.softmax(values, dim=0)
        choice = int(torch.multinomial(probs, 1, generator=generator))
        tokens[pos] = int(candidates[choice])
        log_probs.append(float(torch.log(probs[choice])))
        if step_callback is not None:
            visible = np.nonzero((tokens != MASK_TOKEN) | hint_mask)[0]
            step_callback(done + 1, len(positions), tuple(int(v) for v in visible))
    return tokens, log_probs


def _run(
    gray: GrayImage,
    gray_feats,
    base_tokens: np.ndarray,
    positions: list[int],
    hints: HintSet,
    vqgan: ChromaVqgan,
    model: HybridTransformer,
    cfg: SamplerConfig,
    step_callback: StepCallback | None,
) -> SampleResult:
    if cfg.top_k > model.cfg.codebook_size:
        raise ValueError(
            f"top_k {cfg.top_k} exceeds codebook size {model.cfg.codebook_size}"
        )
    length = model.cfg.length
    hint_mask, hint_rgb = hints_to_arrays(hints, length)
    hint_tokens = None
    if len(hints) and (cfg.hard_hint_tokens or model.cfg.hint_mode == "quantized"):
        hint_tokens = np.zeros(length, dtype=np.int64)
        cells = np.nonzero(hint_mask)[0]
        hint_tokens[cells] = hint_colors_to_tokens(vqgan, hint_rgb[cells])
    if cfg.hard_hint_tokens and len(hints):
        # hint cells become fixed tokens instead of soft conditioning
        cells = np.nonzero(hint_mask)[0]
        base_tokens = base_tokens.copy()
        base_tokens[cells] = hint_tokens[cells]
        hint_mask = np.zeros_like(hint_mask)
        positions = [p for p in positions if p not in set(cells.tolist())]

    grid = hints.grid
    gray_arr = gray_feats.values.reshape(-1, gray_feats.channels).astype(np.float32)
    images, grids, logps, seeds = [], [], [], []
    for chain in range(cfg.num_samples):
        seed = chain_seed(cfg.seed, chain)
        gen = torch.Generator().manual_seed(seed)
        tokens, lp = _sample_chain(
            model, base_tokens, gray_arr, hint_mask, hint_rgb, hint_tokens,
            positions, cfg, gen, step_callback,
        )
        if (tokens == MASK_TOKEN).any():
            raise RuntimeError("internal error: MASK tokens left after sampling")
        token_grid = TokenGrid(tokens.reshape(grid.rows, grid.cols))
        images.append(vqgan.decode_tokens(token_grid, gray_feats))
        grids.append(token_grid)
        logps.append(lp)
        seeds.append(seed)
    return SampleResult(images, grids, logps, seeds, cfg)


def colorize(
    gray: GrayImage,
    hints: HintSet | None,
    vqgan: ChromaVqgan,
    model: HybridTransformer,
    cfg: SamplerConfig,
    step_callback: StepCallback | None = None,
) -> SampleResult:
    """Sample colorizations for a gray image, unconditionally when hints are empty."""
    _validate_pair(vqgan, model)
    grid = _grid_for(vqgan, model, gray.height, gray.width)
    if hints is None:
        hints = HintSet.empty(grid)
    elif hints.grid != grid:
        raise ValueError("hint grid does not match the image grid")
    gray_feats = vqgan.encode_gray_image(gray)
    base = np.full(grid.num_cells, MASK_TOKEN, dtype=np.int64)
    positions = list(range(grid.num_cells))
    return _run(gray, gray_feats, base, positions, hints, vqgan, model, cfg, step_callback)


def recolorize(
    image: ColorImage,
    region: RegionMask,
    hints: HintSet | None,
    vqgan: ChromaVqgan,
    model: HybridTransformer,
    cfg: SamplerConfig,
    step_callback: StepCallback | None = None,
) -> SampleResult:
    """Resample only the tokens inside the region of an existing color image."""
    _validate_pair(vqgan, model)
    grid = _grid_for(vqgan, model, image.height, image.width)
    if region.grid != grid:
        raise ValueError("region grid does not match the image grid")
    if region.num_selected == 0:
        raise ValueError("nothing to resample: empty region")
    if hints is None:
        hints = HintSet.empty(grid)
    elif hints.grid != grid:
        raise ValueError("hint grid does not match the image grid")

    original = vqgan.tokenize_image(image).indices.reshape(-1)
    flags = region.selected.reshape(-1)
    base = original.copy()
    base[flags] = MASK_TOKEN
    positions = [int(p) for p in np.nonzero(flags)[0]]
    gray = to_grayscale(image)
    result = _run(
        gray, vqgan.encode_gray_image(gray), base, positions, hints, vqgan, model,
        cfg, step_callback,
    )
    outside = ~flags
    for token_grid in result.token_grids:
        if not np.array_equal(token_grid.indices.reshape(-1)[outside], original[outside]):
            raise RuntimeError("internal error: tokens outside the region changed")
    return result


def diverse_batch(
    gray: GrayImage,
    hints: HintSet | None,
    vqgan: ChromaVqgan,
    model: HybridTransformer,
    cfg: SamplerConfig,
) -> SampleResult:
    """Independent chains plus a mean pairwise token Hamming-distance statistic."""
    if cfg.num_samples < 2:
        raise ValueError("diverse_batch needs num_samples >= 2")
    result = colorize(gray, hints, vqgan, model, cfg)
    result.diversity = mean_pairwise_hamming(result.token_grids)
    return result


def mean_pairwise_hamming(grids: list[TokenGrid]) -> float:
    total, pairs = 0.0, 0
    for i in range(len(grids)):
        for j in range(i + 1, len(grids)):
            total += float(np.mean(grids[i].indices != grids[j].indices))
            pairs += 1
    return total / pairs if pairs else 0.0


def save_result(result: SampleResult, outdir, stem: str = "sample") -> list[Path]:
    """PNGs plus a sidecar JSON with everything needed to replay the run."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = []
    for i, img in enumerate(result.images):
        path = outdir / f"{stem}_{i:02d}.png"
        save_png(img, path)
        paths.append(path)
    manifest = {
        "config": result.config.to_dict(),
        "chain_seeds": result.chain_seeds,
        "token_grids": [g.indices.tolist() for g in result.token_grids],
        "log_probs": result.log_probs,
        "diversity": result.diversity,
        "images": [p.name for p in paths],
    }
    (outdir / f"{stem}_manifest.json").write_text(json.dumps(manifest, indent=2))
    return paths
