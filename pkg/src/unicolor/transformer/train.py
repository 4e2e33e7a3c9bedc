"""BERT-style training of the hybrid transformer on frozen tokenizer output.

Every step draws images, masks a random subset of their color tokens,
injects dominant-superpixel hint colors at a random subset of the masked
cells, and minimizes cross-entropy between the predictions and the original
token indices at the masked cells.  The tokenizer is frozen; its gray
features, token grids and per-cell dominant colors are precomputed once.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import torch

from ..checkpoints import config_fingerprint, load_archive, save_archive
from ..conditions import hint_colors_for_cells
from ..core import CellGrid, ColorImage, to_grayscale
from ..vqgan.model import ChromaVqgan
from ..vqgan.quantize import nearest_entries
from ..vqgan.train import TrainingDiverged, _resume_compatible
from .masking import MaskSpec, sample_training_mask
from .model import HybridTransformer, TransformerConfig, build_transformer

HINT_PATCH_CELLS = 4  # uniform-color probe image is (4d)x(4d), center cell read


@dataclass
class PrecomputedSet:
    tokens: np.ndarray        # (n, L) int64 ground-truth indices
    gray: np.ndarray          # (n, L, code_dim) float32
    hint_rgb: np.ndarray      # (n, L, 3) float64 dominant superpixel colors
    hint_tokens: np.ndarray | None  # (n, L) int64, quantized-hint mode only


@dataclass
class TransformerTrainRecord:
    model: HybridTransformer
    config: TransformerConfig
    loss_rows: list[dict]
    eval_history: list[tuple[int, float, float]]  # (step, masked CE, masked top-1 acc)
    hints_injected: int
    vqgan_fingerprint: str


def hint_colors_to_tokens(vqgan: ChromaVqgan, colors: np.ndarray) -> np.ndarray:
    """Map hint colors to codebook indices via uniform-color probe images."""
    d = vqgan.cfg.d
    size = HINT_PATCH_CELLS * d
    unique, inverse = np.unique(np.round(colors, 6).reshape(-1, 3), axis=0, return_inverse=True)
    center = HINT_PATCH_CELLS // 2
    codebook = vqgan.codebook()
    unique_tokens = np.empty(unique.shape[0], dtype=np.int64)
    for start in range(0, unique.shape[0], 256):
        chunk = unique[start : start + 256]
        batch = torch.from_numpy(chunk).float()[:, :, None, None].expand(-1, -1, size, size)
        with torch.no_grad():
            feats = vqgan.color_encoder(batch.contiguous())
        vectors = feats[:, :, center, center].numpy().astype(np.float64)
        unique_tokens[start : start + 256] = nearest_entries(vectors, codebook)
    return unique_tokens[inverse].reshape(colors.shape[:-1])


def precompute_features(
    images: Sequence[ColorImage],
    vqgan: ChromaVqgan,
    with_hint_tokens: bool = False,
) -> PrecomputedSet:
    d = vqgan.cfg.d
    tokens, gray, hint_rgb = [], [], []
    for img in images:
        grid = CellGrid.for_image(img.height, img.width, d)
        cells = [grid.unflatten(i) for i in range(grid.num_cells)]
        tokens.append(vqgan.tokenize_image(img).indices.reshape(-1))
        gf = vqgan.encode_gray_image(to_grayscale(img))
        gray.append(gf.values.reshape(-1, gf.channels).astype(np.float32))
        hint_rgb.append(np.array(hint_colors_for_cells(img, grid, cells)))
    tokens_arr = np.stack(tokens)
    hint_rgb_arr = np.stack(hint_rgb)
    hint_tokens = None
    if with_hint_tokens:
        hint_tokens = hint_colors_to_tokens(vqgan, hint_rgb_arr)
    return PrecomputedSet(tokens_arr, np.stack(gray), hint_rgb_arr, hint_tokens)


def _gray_source(pre: PrecomputedSet) -> np.ndarray:
    return pre.gray


def _eval_masks(length: int, count: int, cfg: TransformerConfig) -> list[MaskSpec]:
    rng = np.random.default_rng(cfg.seed ^ 0x5EED)
    return [
        sample_training_mask(
            length, rng, cfg.effective_mask_min, cfg.effective_hint_max,
            cfg.full_mask_prob, hint_prob=0.0,
        )
        for _ in range(count)
    ]


@torch.no_grad()
def masked_eval(
    model: HybridTransformer, pre: PrecomputedSet, masks: list[MaskSpec]
) -> tuple[float, float]:
    """Held-out masked CE and top-1 accuracy with hint-free masks."""
    total_ce, total_hits, total_cells = 0.0, 0, 0
    length = model.cfg.length
    for i, mask in enumerate(masks):
        idx = i % pre.tokens.shape[0]
        tok = pre.tokens[idx].copy()
        sel = list(mask.masked_cells)
        tok[sel] = -1
        seq = model.assemble(
            torch.from_numpy(tok)[None],
            torch.from_numpy(pre.gray[idx])[None],
            torch.zeros(1, length, dtype=torch.bool),
            torch.zeros(1, length, 3),
        )
        logits = model(seq)[0]
        targets = torch.from_numpy(pre.tokens[idx][sel])
        ce = torch.nn.functional.cross_entropy(logits[sel], targets)
        total_ce += float(ce) * len(sel)
        total_hits += int((logits[sel].argmax(dim=-1) == targets).sum())
        total_cells += len(sel)
    return total_ce / total_cells, total_hits / total_cells


def train_transformer(
    dataset: Sequence[ColorImage],
    vqgan: ChromaVqgan,
    cfg: TransformerConfig,
    heldout: Sequence[ColorImage] | None = None,
    out_path=None,
    resume_from=None,
    log_path=None,
    precomputed: PrecomputedSet | None = None,
    heldout_precomputed: PrecomputedSet | None = None,
) -> TransformerTrainRecord:
    if cfg.codebook_size != vqgan.cfg.codebook_size or cfg.code_dim != vqgan.cfg.code_dim:
        raise ValueError("transformer config does not match the tokenizer's codebook")
    if heldout is None and heldout_precomputed is None:
        n_val = min(16, max(1, len(dataset) // 10))
        heldout = dataset[-n_val:]
        dataset = dataset[:-n_val]

    need_hint_tokens = cfg.hint_mode == "quantized"
    vqgan.eval()
    pre = precomputed or precompute_features(dataset, vqgan, need_hint_tokens)
    pre_val = heldout_precomputed or precompute_features(heldout, vqgan, False)
    vq_fp = config_fingerprint(vqgan.cfg.to_dict())

    model = build_transformer(cfg)
    opt = torch.optim.Adam(model.parameters(), lr=cfg.lr)
    rng = np.random.default_rng(cfg.seed)
    start_step = 0
    loss_rows: list[dict] = []
    eval_history: list[tuple[int, float, float]] = []
    hints_injected = 0

    if resume_from is not None:
        payload = load_archive(resume_from, "transformer")
        if not _resume_compatible(payload["config"], cfg.to_dict()):
            raise ValueError("resume checkpoint was trained with a different config")
        model.load_state_dict(payload["model_state"])
        extra = payload["extra"]
        opt.load_state_dict(extra["opt"])
        rng.bit_generator.state = extra["np_rng"]
        torch.set_rng_state(extra["torch_rng"])
        start_step = extra["step"]
        loss_rows = list(extra.get("loss_rows", []))
        eval_history = [tuple(x) for x in extra.get("eval_history", [])]
        hints_injected = extra.get("hints_injected", 0)

    length = cfg.length
    if pre.tokens.shape[1] != length:
        raise ValueError(
            f"dataset produces {pre.tokens.shape[1]} cells per image, config says {length}"
        )
    eval_masks = _eval_masks(length, max(8, pre_val.tokens.shape[0]), cfg)
    eval_every = cfg.eval_every or max(1, cfg.steps // 8)
    if start_step == 0:
        eval_history.append((0, *masked_eval(model, pre_val, eval_masks)))

    n = pre.tokens.shape[0]
    for step in range(start_step, cfg.steps):
        idx = rng.choice(n, size=min(cfg.batch_size, n), replace=n < cfg.batch_size)
        toks, hmasks, hrgbs, htoks, mask_bools = [], [], [], [], []
        for i in idx:
            spec = sample_training_mask(
                length, rng, cfg.effective_mask_min, cfg.effective_hint_max,
                cfg.full_mask_prob, cfg.hint_prob,
            )
            tok = pre.tokens[i].copy()
            sel = list(spec.masked_cells)
            tok[sel] = -1
            hmask = spec.hint_array()
            hrgb = np.zeros((length, 3))
            htok = np.zeros(length, dtype=np.int64)
            if spec.hint_cells:
                cells = list(spec.hint_cells)
                hrgb[cells] = pre.hint_rgb[i][cells]
                if need_hint_tokens:
                    htok[cells] = pre.hint_tokens[i][cells]
                hints_injected += len(cells)
            toks.append(tok)
            hmasks.append(hmask)
            hrgbs.append(hrgb)
            htoks.append(htok)
            mask_bools.append(spec.mask_array())

        tokens_t = torch.from_numpy(np.stack(toks))
        gray_t = torch.from_numpy(pre.gray[idx])
        hmask_t = torch.from_numpy(np.stack(hmasks))
        hrgb_t = torch.from_numpy(np.stack(hrgbs)).float()
        htok_t = torch.from_numpy(np.stack(htoks)) if need_hint_tokens else None
        mask_t = torch.from_numpy(np.stack(mask_bools))
        targets_t = torch.from_numpy(pre.tokens[idx])

        seq = model.assemble(tokens_t, gray_t, hmask_t, hrgb_t, htok_t)
        logits = model(seq)
        loss = torch.nn.functional.cross_entropy(logits[mask_t], targets_t[mask_t])
        if not torch.isfinite(loss):
            raise TrainingDiverged(f"non-finite transformer loss at step {step}")
        opt.zero_grad(set_to_none=True)
        loss.backward()
        opt.step()

        loss_rows.append({"step": step, "loss": float(loss.detach())})
        if (step + 1) % eval_every == 0 or step + 1 == cfg.steps:
            eval_history.append((step + 1, *masked_eval(model, pre_val, eval_masks)))

    if log_path is not None:
        import json

        with open(log_path, "w") as f:
            for row in loss_rows:
                f.write(json.dumps(row) + "\n")

    if out_path is not None:
        save_transformer(
            out_path, model, opt, rng, cfg, cfg.steps, loss_rows, eval_history,
            hints_injected, vq_fp,
        )
    return TransformerTrainRecord(model, cfg, loss_rows, eval_history, hints_injected, vq_fp)


def save_transformer(
    path, model, opt, rng, cfg, step, loss_rows, eval_history, hints_injected, vq_fp
) -> None:
    save_archive(
        path,
        "transformer",
        cfg.to_dict(),
        model.state_dict(),
        extra={
            "opt": opt.state_dict(),
            "np_rng": rng.bit_generator.state,
            "torch_rng": torch.get_rng_state(),
            "step": step,
            "loss_rows": loss_rows,
            "eval_history": [list(x) for x in eval_history],
            "hints_injected": hints_injected,
            "vqgan_fingerprint": vq_fp,
        },
    )


def load_transformer(path) -> tuple[HybridTransformer, str | None]:
    """Load a trained model plus the fingerprint of its paired tokenizer."""
    payload = load_archive(path, "transformer")
    cfg = TransformerConfig(**payload["config"])
    model = HybridTransformer(cfg)
    model.load_state_dict(payload["model_state"])
    model.eval()
    return model, payload["extra"].get("vqgan_fingerprint")


def save_transformer_model(path, model: HybridTransformer, vq_fp: str | None = None) -> None:
    save_archive(
        path,
        "transformer",
        model.cfg.to_dict(),
        model.state_dict(),
        extra={"vqgan_fingerprint": vq_fp},
    )
