"""Evaluation harness: native metrics, plug-in metrics, hint compliance.

Colorfulness, PSNR and SSIM are computed natively.  FID, LPIPS, contextual
loss and CLIP score all require large pretrained feature extractors, so they
are plug-in slots: register a callable taking (originals, generated) lists of
images and returning a float, otherwise the report marks them unavailable.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ..checkpoints import config_fingerprint
from ..core import CellGrid, ColorImage, colorfulness, psnr, ssim, to_grayscale
from ..conditions import synthesize_training_hints
from ..core.hints import HintSet
from ..sampler import SamplerConfig, colorize
from ..transformer.model import HybridTransformer
from ..vqgan.model import ChromaVqgan

NATIVE_METRICS = ("colorfulness", "psnr", "ssim")
PLUGGABLE_METRICS = ("fid", "lpips", "contextual", "clip_score")

MetricPlugin = Callable[[Sequence[ColorImage], Sequence[ColorImage]], float]

_PLUGINS: dict[str, MetricPlugin] = {}


def register_metric_plugin(name: str, fn: MetricPlugin) -> None:
    if name not in PLUGGABLE_METRICS:
        raise ValueError(f"unknown pluggable metric: {name}")
    _PLUGINS[name] = fn


def clear_metric_plugins() -> None:
    _PLUGINS.clear()


@dataclass
class EvalReport:
    metrics: dict[str, float | str]
    fingerprints: dict[str, str] = field(default_factory=dict)
    manifests: dict[str, list] = field(default_factory=dict)

    def to_json(self) -> str:
        def encode(value):
            if isinstance(value, float) and math.isinf(value):
                return "identical"
            return value

        doc = {
            "metrics": {k: encode(v) for k, v in self.metrics.items()},
            "fingerprints": self.fingerprints,
            "manifests": self.manifests,
        }
        return json.dumps(doc, indent=2)


def run_eval(
    images: Sequence[ColorImage],
    metrics: Sequence[str],
    vqgan: ChromaVqgan | None = None,
    image_ids: Sequence[str] | None = None,
) -> EvalReport:
    """Compute the requested metrics over a dataset.

    PSNR and SSIM compare each image against its tokenizer reconstruction and
    therefore need a trained model; colorfulness is computed on the images
    themselves, as done for ground-truth reference rows.
    """
    if not images:
        raise ValueError("empty image list")
    ids = list(image_ids) if image_ids is not None else [str(i) for i in range(len(images))]
    report = EvalReport(metrics={}, manifests={"images": ids})
    if vqgan is not None:
        report.fingerprints["vqgan"] = config_fingerprint(vqgan.cfg.to_dict())

    recon_cache: list[ColorImage] | None = None

    def reconstructions() -> list[ColorImage]:
        nonlocal recon_cache
        if vqgan is None:
            raise ValueError("psnr/ssim need a trained tokenizer checkpoint")
        if recon_cache is None:
            recon_cache = [vqgan.reconstruct(img, to_grayscale(img)) for img in images]
        return recon_cache

    for name in metrics:
        if name == "colorfulness":
            report.metrics[name] = float(np.mean([colorfulness(img) for img in images]))
        elif name == "psnr":
            values = [psnr(img, rec) for img, rec in zip(images, reconstructions())]
            report.metrics[name] = (
                math.inf if any(math.isinf(v) for v in values) else float(np.mean(values))
            )
            report.manifests["psnr_per_image"] = [
                "identical" if math.isinf(v) else v for v in values
            ]
        elif name == "ssim":
            values = [ssim(img, rec) for img, rec in zip(images, reconstructions())]
            report.metrics[name] = float(np.mean(values))
        elif name in PLUGGABLE_METRICS:
            plugin = _PLUGINS.get(name)
            if plugin is None:
                report.metrics[name] = (
                    f"unavailable: no feature extractor registered; call "
                    f"register_metric_plugin({name!r}, fn) with a plug-in"
                )
            else:
                report.metrics[name] = float(plugin(images, reconstructions()))
        else:
            raise ValueError(f"unknown metric: {name!r}")
    return report


def cell_mean_colors(image: ColorImage, grid: CellGrid) -> np.ndarray:
    d = grid.cell_size
    return image.rgb.reshape(grid.rows, d, grid.cols, d, 3).mean(axis=(1, 3))


def _random_hints(grid: CellGrid, rng: np.random.Generator, max_hints: int = 16) -> HintSet:
    """Stroke-like hints: arbitrary colors at random cells."""
    from ..core.hints import HintPoint, HintSource

    count = int(rng.integers(1, max_hints + 1))
    cells = rng.choice(grid.num_cells, size=min(count, grid.num_cells), replace=False)
    points = tuple(
        HintPoint(int(c) // grid.cols, int(c) % grid.cols, tuple(rng.random(3)), HintSource.MANUAL)
        for c in cells
    )
    return HintSet(grid, points)


def hint_compliance(
    images: Sequence[ColorImage],
    vqgan: ChromaVqgan,
    model: HybridTransformer,
    seed: int = 0,
    sampler: SamplerConfig | None = None,
    hint_source: str = "superpixel",
) -> tuple[float, float]:
    """Mean RGB distance at hint cells for hinted vs unconditional sampling.

    For each image one sample is drawn with hints and one without; the
    Euclidean RGB distance between each hint color and the sampled image's
    mean color over the hint cell is averaged.  ``hint_source`` is
    "superpixel" for dominant-color hints from the image itself, or "random"
    for stroke-like hints in arbitrary colors, which stress how precisely the
    conditioning carries a color.  Returns (hinted, unconditional).
    """
    if hint_source not in ("superpixel", "random"):
        raise ValueError(f"unknown hint_source: {hint_source!r}")
    rng = np.random.default_rng(seed)
    base = sampler or SamplerConfig(num_samples=1, seed=seed)
    hinted_err, uncond_err = [], []
    for i, img in enumerate(images):
        grid = CellGrid.for_image(img.height, img.width, vqgan.cfg.d)
        if hint_source == "superpixel":
            hints = synthesize_training_hints(img, grid, rng)
        else:
            hints = _random_hints(grid, rng)
        if len(hints) == 0:
            continue
        gray = to_grayscale(img)
        cfg = SamplerConfig(
            top_k=base.top_k, temperature=base.temperature, num_samples=1,
            seed=base.seed + i, hard_hint_tokens=base.hard_hint_tokens,
        )
        with_hints = colorize(gray, hints, vqgan, model, cfg)
        without = colorize(gray, HintSet.empty(grid), vqgan, model, cfg)
        means_h = cell_mean_colors(with_hints.images[0], grid)
        means_u = cell_mean_colors(without.images[0], grid)
        for p in hints:
            target = np.array(p.color)
            hinted_err.append(float(np.linalg.norm(means_h[p.row, p.col] - target)))
            uncond_err.append(float(np.linalg.norm(means_u[p.row, p.col] - target)))
    return float(np.mean(hinted_err)), float(np.mean(uncond_err))
