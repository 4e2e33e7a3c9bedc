"""Paired ablation runners: each trains a default and a variant model that
differ in exactly one config switch, under identical seeds and data, and
reports the paired metrics.

Trained checkpoints are cached in the working directory keyed by config
fingerprint, so repeated runs reuse earlier training.
"""

from __future__ import annotations

from dataclasses import replace
from pathlib import Path
from typing import Sequence

import numpy as np

from ..checkpoints import config_fingerprint
from ..core import ColorImage
from ..sampler import SamplerConfig
from ..transformer.model import TransformerConfig
from ..transformer.train import load_transformer, masked_eval, precompute_features, train_transformer, _eval_masks
from ..vqgan.model import ChromaVqgan, VqganConfig
from ..vqgan.train import load_vqgan, train_vqgan
from .evaluate import EvalReport, hint_compliance, run_eval

ABLATIONS = ("quant_gray", "quant_hint", "chroma_vs_quant_vqgan")


def config_delta(a: dict, b: dict) -> set[str]:
    keys = set(a) | set(b)
    return {k for k in keys if a.get(k) != b.get(k)}


def dataset_fingerprint(images: Sequence[ColorImage]) -> str:
    """Cheap content hash so cached checkpoints stay bound to their data."""
    import hashlib

    h = hashlib.sha256(str(len(images)).encode())
    stride = max(1, len(images) // 32)
    for img in images[::stride]:
        h.update(np.round(img.rgb[::8, ::8] * 255).astype(np.uint8).tobytes())
    return h.hexdigest()


def train_vqgan_cached(
    dataset: Sequence[ColorImage],
    heldout: Sequence[ColorImage],
    cfg: VqganConfig,
    workdir: Path,
) -> ChromaVqgan:
    workdir = Path(workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    key = f"{config_fingerprint(cfg.to_dict())[:12]}_{dataset_fingerprint(dataset)[:8]}"
    path = workdir / f"vqgan_{key}.pt"
    if path.exists():
        return load_vqgan(path)
    record = train_vqgan(dataset, cfg, heldout=heldout, out_path=path)
    return record.model


def train_transformer_cached(
    dataset: Sequence[ColorImage],
    heldout: Sequence[ColorImage],
    vqgan: ChromaVqgan,
    cfg: TransformerConfig,
    workdir: Path,
):
    workdir = Path(workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    key = config_fingerprint(
        {"tr": cfg.to_dict(), "vq": config_fingerprint(vqgan.cfg.to_dict())}
    )[:12]
    path = workdir / f"transformer_{key}_{dataset_fingerprint(dataset)[:8]}.pt"
    if path.exists():
        return load_transformer(path)[0]
    record = train_transformer(dataset, vqgan, cfg, heldout=heldout, out_path=path)
    return record.model


def run_ablation_from_yaml(path, workdir: Path | str = "ablations") -> EvalReport:
    """Load an ablation description (see configs/ablations/) and run it."""
    import yaml

    from .dataset import generate_dataset

    doc = yaml.safe_load(Path(path).read_text())
    name = doc["ablation"]
    if name not in ABLATIONS:
        raise ValueError(f"unknown ablation: {name!r}; choose one of {ABLATIONS}")
    vq_cfg = VqganConfig(**doc["vqgan"])
    tr_doc = doc.get("transformer")
    tr_cfg = None
    if tr_doc is not None:
        tr_doc = dict(tr_doc)
        if "L" in tr_doc:
            tr_doc["length"] = tr_doc.pop("L")
        tr_cfg = TransformerConfig(
            codebook_size=vq_cfg.codebook_size, code_dim=vq_cfg.code_dim, **tr_doc
        )
    size = int(doc.get("image_size", 64))
    seed = int(doc.get("data_seed", 1))
    train = generate_dataset(int(doc.get("train_count", 512)), size=size, seed=seed)
    heldout = generate_dataset(int(doc.get("heldout_count", 32)), size=size, seed=seed + 1)
    return run_ablation(name, train, heldout, vq_cfg, tr_cfg, workdir=workdir)


def run_ablation(
    name: str,
    dataset: Sequence[ColorImage],
    heldout: Sequence[ColorImage],
    vqgan_cfg: VqganConfig,
    transformer_cfg: TransformerConfig | None = None,
    workdir: Path | str = "ablations",
) -> EvalReport:
    if name not in ABLATIONS:
        raise ValueError(f"unknown ablation: {name!r}; choose one of {ABLATIONS}")
    workdir = Path(workdir)

    if name == "chroma_vs_quant_vqgan":
        variant_cfg = replace(vqgan_cfg, quantize_gray=True)
        delta = config_delta(vqgan_cfg.to_dict(), variant_cfg.to_dict())
        assert delta == {"quantize_gray"}, delta
        default = train_vqgan_cached(dataset, heldout, vqgan_cfg, workdir)
        variant = train_vqgan_cached(dataset, heldout, variant_cfg, workdir)
        default_psnr = run_eval(heldout, ["psnr"], vqgan=default).metrics["psnr"]
        variant_psnr = run_eval(heldout, ["psnr"], vqgan=variant).metrics["psnr"]
        return EvalReport(
            metrics={
                "default_psnr": default_psnr,
                "variant_psnr": variant_psnr,
            },
            fingerprints={
                "default_vqgan": config_fingerprint(vqgan_cfg.to_dict()),
                "variant_vqgan": config_fingerprint(variant_cfg.to_dict()),
            },
            manifests={"config_delta": sorted(delta), "heldout_size": [len(heldout)]},
        )

    if transformer_cfg is None:
        raise ValueError(f"ablation {name!r} needs a transformer config")

    if name == "quant_hint":
        variant_cfg = replace(transformer_cfg, hint_mode="quantized")
        delta = config_delta(transformer_cfg.to_dict(), variant_cfg.to_dict())
        assert delta == {"hint_mode"}, delta
        vqgan = train_vqgan_cached(dataset, heldout, vqgan_cfg, workdir)
        default = train_transformer_cached(dataset, heldout, vqgan, transformer_cfg, workdir)
        variant = train_transformer_cached(dataset, heldout, vqgan, variant_cfg, workdir)
        sampler = SamplerConfig(seed=transformer_cfg.seed)
        # stroke-like hints in arbitrary colors: the variant must first snap
        # the color to a token, the default conditions on the exact value
        cont_h, cont_u = hint_compliance(
            heldout, vqgan, default, seed=0, sampler=sampler, hint_source="random"
        )
        quant_h, quant_u = hint_compliance(
            heldout, vqgan, variant, seed=0, sampler=sampler, hint_source="random"
        )
        return EvalReport(
            metrics={
                "continuous_hint_delta_e": cont_h,
                "quantized_hint_delta_e": quant_h,
                "continuous_unconditional_delta_e": cont_u,
                "quantized_unconditional_delta_e": quant_u,
            },
            fingerprints={
                "vqgan": config_fingerprint(vqgan_cfg.to_dict()),
                "default_transformer": config_fingerprint(transformer_cfg.to_dict()),
                "variant_transformer": config_fingerprint(variant_cfg.to_dict()),
            },
            manifests={"config_delta": sorted(delta), "heldout_size": [len(heldout)]},
        )

    # quant_gray: the gray half of the sequence comes from a gray-quantizing
    # tokenizer instead of continuous gray features.
    variant_tr_cfg = replace(transformer_cfg, quant_gray=True)
    variant_vq_cfg = replace(vqgan_cfg, quantize_gray=True)
    delta = config_delta(transformer_cfg.to_dict(), variant_tr_cfg.to_dict())
    assert delta == {"quant_gray"}, delta
    default_vq = train_vqgan_cached(dataset, heldout, vqgan_cfg, workdir)
    variant_vq = train_vqgan_cached(dataset, heldout, variant_vq_cfg, workdir)
    default = train_transformer_cached(dataset, heldout, default_vq, transformer_cfg, workdir)
    variant = train_transformer_cached(dataset, heldout, variant_vq, variant_tr_cfg, workdir)
    masks_cfg = transformer_cfg
    pre_default = precompute_features(heldout, default_vq, False)
    pre_variant = precompute_features(heldout, variant_vq, False)
    masks = _eval_masks(masks_cfg.length, max(8, len(heldout)), masks_cfg)
    default_ce, default_acc = masked_eval(default, pre_default, masks)
    variant_ce, variant_acc = masked_eval(variant, pre_variant, masks)
    return EvalReport(
        metrics={
            "default_masked_ce": default_ce,
            "variant_masked_ce": variant_ce,
            "default_masked_acc": default_acc,
            "variant_masked_acc": variant_acc,
        },
        fingerprints={
            "default_vqgan": config_fingerprint(vqgan_cfg.to_dict()),
            "variant_vqgan": config_fingerprint(variant_vq_cfg.to_dict()),
            "default_transformer": config_fingerprint(transformer_cfg.to_dict()),
            "variant_transformer": config_fingerprint(variant_tr_cfg.to_dict()),
        },
        manifests={"config_delta": sorted(delta), "heldout_size": [len(heldout)]},
    )
