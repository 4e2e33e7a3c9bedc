"""Masked color-token transformer over a hybrid gray/color/hint input.

The input sequence concatenates two halves of length L: projections of the
continuous gray features, then color-token embeddings.  Masked cells carry a
learned MASK embedding unless they hold a hint, in which case the slot is the
hint color mapped through a learned linear map plus a hint marker vector.
Both halves share one positional table and are distinguished by a learned
segment offset.  Attention is full and unmasked; the head predicts codebook
logits at every color position.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
import torch
from torch import nn

from ..core import HintSet
from ..vqgan.quantize import MASK_TOKEN, FeatureMap, TokenGrid
from .masking import FULL_MASK_PROB, HINT_PROB, MaskSpec


@dataclass(frozen=True)
class TransformerConfig:
    layers: int = 4
    heads: int = 4
    d_e: int = 128
    length: int = 64                 # L = grid rows * cols
    codebook_size: int = 512         # must match the tokenizer
    code_dim: int = 64               # gray feature channels from the tokenizer
    mask_min: int = 0                # 0 -> length // 16
    hint_max: int = 0                # 0 -> length // 16
    full_mask_prob: float = FULL_MASK_PROB
    hint_prob: float = HINT_PROB
    hint_mode: str = "continuous"    # or "quantized" (ablation)
    quant_gray: bool = False         # ablation: gray half fed from quantized tokens
    lr: float = 3.0e-4
    batch_size: int = 16
    steps: int = 2000
    seed: int = 0
    eval_every: int = 0

    def __post_init__(self):
        if self.d_e % self.heads:
            raise ValueError("d_e must be divisible by heads")
        if self.hint_mode not in ("continuous", "quantized"):
            raise ValueError(f"unknown hint_mode: {self.hint_mode}")

    @property
    def effective_mask_min(self) -> int:
        return self.mask_min or max(1, self.length // 16)

    @property
    def effective_hint_max(self) -> int:
        return self.hint_max or max(1, self.length // 16)

    def to_dict(self) -> dict:
        return asdict(self)


class Block(nn.Module):
    def __init__(self, d_e: int, heads: int):
        super().__init__()
        self.ln1 = nn.LayerNorm(d_e)
        self.attn = nn.MultiheadAttention(d_e, heads, batch_first=True)
        self.ln2 = nn.LayerNorm(d_e)
        self.mlp = nn.Sequential(
            nn.Linear(d_e, 4 * d_e), nn.GELU(), nn.Linear(4 * d_e, d_e)
        )

    def forward(self, x):
        h = self.ln1(x)
        attn_out, _ = self.attn(h, h, h, need_weights=False)
        x = x + attn_out
        return x + self.mlp(self.ln2(x))


class HybridTransformer(nn.Module):
    def __init__(self, cfg: TransformerConfig):
        super().__init__()
        self.cfg = cfg
        n = cfg.codebook_size
        self.token_embedding = nn.Embedding(n + 1, cfg.d_e)  # index n == MASK
        self.gray_proj = nn.Linear(cfg.code_dim, cfg.d_e)
        self.hint_weight = nn.Linear(3, cfg.d_e, bias=False)
        self.hint_marker = nn.Parameter(torch.zeros(cfg.d_e))
        self.pos_table = nn.Parameter(torch.randn(cfg.length, cfg.d_e) * 0.02)
        self.segment = nn.Parameter(torch.randn(2, cfg.d_e) * 0.02)
        self.blocks = nn.ModuleList(Block(cfg.d_e, cfg.heads) for _ in range(cfg.layers))
        self.ln_f = nn.LayerNorm(cfg.d_e)
        self.head = nn.Linear(cfg.d_e, n)

    @property
    def mask_index(self) -> int:
        return self.cfg.codebook_size

    def assemble(
        self,
        tokens: torch.Tensor,       # (B, L) int64, MASK_TOKEN for unknown cells
        gray: torch.Tensor,         # (B, L, code_dim)
        hint_mask: torch.Tensor,    # (B, L) bool
        hint_rgb: torch.Tensor,     # (B, L, 3)
        hint_tokens: torch.Tensor | None = None,  # (B, L) int64, quantized mode
    ) -> torch.Tensor:
        """Build the (B, 2L, d_e) hybrid input sequence."""
        cfg = self.cfg
        tok = tokens.clone()
        tok[tok == MASK_TOKEN] = self.mask_index
        color_part = self.token_embedding(tok)
        if hint_mask.any():
            if cfg.hint_mode == "continuous":
                hint_part = self.hint_weight(hint_rgb) + self.hint_marker
            else:
                if hint_tokens is None:
                    raise ValueError("quantized hint mode needs hint tokens")
                hint_part = self.token_embedding(hint_tokens.clamp(min=0))
            color_part = torch.where(hint_mask[..., None], hint_part, color_part)
        gray_part = self.gray_proj(gray)
        pos = self.pos_table[None]
        seq = torch.cat(
            [gray_part + pos + self.segment[0], color_part + pos + self.segment[1]],
            dim=1,
        )
        return seq

    def forward(self, seq: torch.Tensor) -> torch.Tensor:
        """Logits over the codebook at every color position: (B, L, N)."""
        x = seq
        for block in self.blocks:
            x = block(x)
        x = self.ln_f(x)
        logits = self.head(x[:, self.cfg.length :])
        if not torch.isfinite(logits).all():
            raise FloatingPointError("non-finite transformer activations")
        return logits


# ---- numpy-boundary helpers (single-sample API used by tests and sampler) --


def _grid_to_flat(tokens: TokenGrid) -> np.ndarray:
    return tokens.indices.reshape(-1)


def hints_to_arrays(hints: HintSet, length: int) -> tuple[np.ndarray, np.ndarray]:
    hint_mask = np.zeros(length, dtype=bool)
    hint_rgb = np.zeros((length, 3), dtype=np.float64)
    cols = hints.grid.cols
    for p in hints:
        flat = p.row * cols + p.col
        hint_mask[flat] = True
        hint_rgb[flat] = p.color
    return hint_mask, hint_rgb


def assemble_input(
    model: HybridTransformer,
    tokens: TokenGrid,
    gray_feats: FeatureMap,
    hints: HintSet,
    training: bool = False,
    hint_tokens: np.ndarray | None = None,
) -> np.ndarray:
    """Single-sample hybrid sequence as a (2L, d_e) array.

    During training, hints are only legal at masked cells; inference starts
    from an all-masked grid so hints may sit anywhere.
    """
    cfg = model.cfg
    length = cfg.length
    flat_tokens = _grid_to_flat(tokens)
    if flat_tokens.shape[0] != length:
        raise ValueError(f"token grid has {flat_tokens.shape[0]} cells, expected {length}")
    hint_mask, hint_rgb = hints_to_arrays(hints, length)
    if training:
        unmasked_hints = hint_mask & (flat_tokens != MASK_TOKEN)
        if unmasked_hints.any():
            bad = int(np.nonzero(unmasked_hints)[0][0])
            raise ValueError(f"hint at unmasked cell {bad} during training")
    gray = gray_feats.values.reshape(-1, gray_feats.channels)
    with torch.no_grad():
        seq = model.assemble(
            torch.from_numpy(flat_tokens.copy())[None],
            torch.from_numpy(gray.copy()).float()[None],
            torch.from_numpy(hint_mask)[None],
            torch.from_numpy(hint_rgb).float()[None],
            None if hint_tokens is None else torch.from_numpy(hint_tokens)[None],
        )
    return seq[0].numpy().astype(np.float64)


def forward_probs(
    model: HybridTransformer,
    tokens: TokenGrid,
    gray_feats: FeatureMap,
    hints: HintSet,
    training: bool = False,
) -> np.ndarray:
    """Per-cell probability vectors over the codebook, shape (L, N)."""
    seq = assemble_input(model, tokens, gray_feats, hints, training)
    with torch.no_grad():
        logits = model(torch.from_numpy(seq).float()[None])
        probs = torch.softmax(logits[0], dim=-1)
    return probs.numpy().astype(np.float64)


def masked_ce_loss(probs: np.ndarray, target: TokenGrid, mask: MaskSpec) -> float:
    """Mean cross-entropy over masked cells only."""
    flat_target = target.indices.reshape(-1)
    if probs.shape[0] != flat_target.shape[0]:
        raise ValueError("probability rows do not match target cells")
    if mask.length != flat_target.shape[0]:
        raise ValueError("mask length does not match target cells")
    cells = list(mask.masked_cells)
    picked = probs[cells, flat_target[cells]]
    if (flat_target[cells] == MASK_TOKEN).any():
        raise ValueError("targets undefined at some masked cells")
    return float(-np.mean(np.log(np.clip(picked, 1e-300, None))))


def build_transformer(cfg: TransformerConfig) -> HybridTransformer:
    torch.manual_seed(cfg.seed)
    return HybridTransformer(cfg)
