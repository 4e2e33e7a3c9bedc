"""Dual-encoder VQ autoencoder with an unquantized gray branch.

The color encoder maps RGB to a (H/d, W/d, code_dim) feature map that is
vector-quantized against a learnable codebook; the gray encoder produces a
feature map of the same shape that stays continuous, so structural detail
survives quantization.  The decoder consumes both maps concatenated on the
channel axis.  A ``quantize_gray`` switch turns the model into the ablation
variant that quantizes the gray branch through its own codebook.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
import torch
from torch import nn

from ..core import ColorImage, GrayImage
from .quantize import Codebook, FeatureMap, TokenGrid, detokenize, tokenize


@dataclass(frozen=True)
class VqganConfig:
    d: int = 8                      # spatial downsample factor == hint cell size
    codebook_size: int = 512
    code_dim: int = 64
    channels: int = 64              # width at the bottleneck
    disc_warmup_steps: int = 1000
    lr: float = 2.0e-3
    batch_size: int = 8
    steps: int = 2000
    seed: int = 0
    commitment_weight: float = 0.25
    gan_weight: float = 0.02
    quantize_gray: bool = False
    codebook_restart: bool = False  # dead-entry restart policy, off by default
    eval_every: int = 0             # 0 -> steps // 8
    padding_mode: str = "zeros"     # "circular" makes shift covariance exact

    def __post_init__(self):
        if self.d < 2 or (self.d & (self.d - 1)) != 0:
            raise ValueError("d must be a power of two >= 2")
        if self.channels % 8:
            raise ValueError("channels must be a multiple of 8")
        if self.padding_mode not in ("zeros", "circular"):
            raise ValueError(f"unknown padding_mode: {self.padding_mode!r}")

    def to_dict(self) -> dict:
        return asdict(self)


def _gn(ch: int) -> nn.GroupNorm:
    return nn.GroupNorm(min(8, ch), ch)


class ResBlock(nn.Module):
    def __init__(self, ch_in: int, ch_out: int, padding_mode: str = "zeros"):
        super().__init__()
        self.norm1 = _gn(ch_in)
        self.conv1 = nn.Conv2d(ch_in, ch_out, 3, padding=1, padding_mode=padding_mode)
        self.norm2 = _gn(ch_out)
        self.conv2 = nn.Conv2d(ch_out, ch_out, 3, padding=1, padding_mode=padding_mode)
        self.skip = nn.Conv2d(ch_in, ch_out, 1) if ch_in != ch_out else nn.Identity()

    def forward(self, x):
        h = self.conv1(torch.nn.functional.silu(self.norm1(x)))
        h = self.conv2(torch.nn.functional.silu(self.norm2(h)))
        return self.skip(x) + h


def _width_schedule(top: int, levels: int) -> list[int]:
    widths = [max(8, top >> (levels - 1 - i)) for i in range(levels)]
    widths = [w - w % 8 if w % 8 else w for w in widths]
    return widths


class Encoder(nn.Module):
    """Downsamples by config.d and projects to code_dim channels."""

    def __init__(self, in_channels: int, cfg: VqganConfig):
        super().__init__()
        levels = int(math.log2(cfg.d))
        widths = _width_schedule(cfg.channels, levels)
        pm = cfg.padding_mode
        layers: list[nn.Module] = [
            nn.Conv2d(in_channels, widths[0], 3, padding=1, padding_mode=pm)
        ]
        ch = widths[0]
        for w in widths:
            layers.append(ResBlock(ch, w, pm))
            layers.append(nn.Conv2d(w, w, 4, stride=2, padding=1, padding_mode=pm))
            ch = w
        layers += [
            ResBlock(ch, ch, pm), _gn(ch), nn.SiLU(),
            nn.Conv2d(ch, cfg.code_dim, 3, padding=1, padding_mode=pm),
        ]
        self.net = nn.Sequential(*layers)

    def forward(self, x):
        return self.net(x)


class Decoder(nn.Module):
    """Upsamples concatenated color/gray features back to an RGB image."""

    def __init__(self, cfg: VqganConfig):
        super().__init__()
        levels = int(math.log2(cfg.d))
        widths = _width_schedule(cfg.channels, levels)[::-1]
        pm = cfg.padding_mode
        layers: list[nn.Module] = [
            nn.Conv2d(2 * cfg.code_dim, widths[0], 3, padding=1, padding_mode=pm)
        ]
        ch = widths[0]
        for w in widths:
            layers.append(ResBlock(ch, w, pm))
            layers.append(nn.Upsample(scale_factor=2, mode="nearest"))
            layers.append(nn.Conv2d(w, w, 3, padding=1, padding_mode=pm))
            ch = w
        layers += [
            ResBlock(ch, ch, pm), _gn(ch), nn.SiLU(),
            nn.Conv2d(ch, 3, 3, padding=1, padding_mode=pm),
        ]
        self.net = nn.Sequential(*layers)

    def forward(self, color_feats, gray_feats):
        x = torch.cat([color_feats, gray_feats], dim=1)
        return 0.5 * (torch.tanh(self.net(x)) + 1.0)


class VectorQuantizer(nn.Module):
    """Nearest-neighbor quantizer with a straight-through gradient."""

    def __init__(self, codebook_size: int, code_dim: int):
        super().__init__()
        self.embedding = nn.Embedding(codebook_size, code_dim)
        # small init keeps codes near the encoder's initial output scale,
        # otherwise a single entry captures everything and the book collapses
        nn.init.uniform_(self.embedding.weight, -1.0 / codebook_size, 1.0 / codebook_size)

    def lookup_indices(self, feats: torch.Tensor) -> torch.Tensor:
        # feats: (B, C, H, W) -> (B, H, W) indices
        b, c, h, w = feats.shape
        flat = feats.permute(0, 2, 3, 1).reshape(-1, c)
        weight = self.embedding.weight
        dists = (
            flat.pow(2).sum(1, keepdim=True)
            - 2.0 * flat @ weight.t()
            + weight.pow(2).sum(1)[None, :]
        )
        return dists.argmin(dim=1).reshape(b, h, w)

    def forward(self, feats: torch.Tensor):
        indices = self.lookup_indices(feats)
        quantized = self.embedding(indices).permute(0, 3, 1, 2)
        codebook_loss = torch.mean((quantized - feats.detach()) ** 2)
        commitment_loss = torch.mean((feats - quantized.detach()) ** 2)
        quantized_st = feats + (quantized - feats).detach()
        return quantized_st, indices, codebook_loss, commitment_loss


class PatchDiscriminator(nn.Module):
    def __init__(self, base: int = 32):
        super().__init__()
        self.net = nn.Sequential(
            nn.Conv2d(3, base, 4, stride=2, padding=1),
            nn.LeakyReLU(0.2),
            nn.Conv2d(base, base * 2, 4, stride=2, padding=1),
            _gn(base * 2),
            nn.LeakyReLU(0.2),
            nn.Conv2d(base * 2, base * 4, 4, stride=2, padding=1),
            _gn(base * 4),
            nn.LeakyReLU(0.2),
            nn.Conv2d(base * 4, 1, 3, padding=1),
        )

    def forward(self, x):
        return self.net(x)


class ChromaVqgan(nn.Module):
    def __init__(self, cfg: VqganConfig):
        super().__init__()
        self.cfg = cfg
        self.color_encoder = Encoder(3, cfg)
        self.gray_encoder = Encoder(1, cfg)
        self.quantizer = VectorQuantizer(cfg.codebook_size, cfg.code_dim)
        self.gray_quantizer = (
            VectorQuantizer(cfg.codebook_size, cfg.code_dim) if cfg.quantize_gray else None
        )
        self.decoder = Decoder(cfg)

    def forward(self, color: torch.Tensor, gray: torch.Tensor):
        """Training path: returns (recon, indices, codebook_loss, commitment_loss)."""
        color_feats = self.color_encoder(color)
        gray_feats = self.gray_encoder(gray)
        quantized, indices, cb_loss, commit_loss = self.quantizer(color_feats)
        if self.gray_quantizer is not None:
            gray_feats, _, g_cb, g_commit = self.gray_quantizer(gray_feats)
            cb_loss = cb_loss + g_cb
            commit_loss = commit_loss + g_commit
        recon = self.decoder(quantized, gray_feats)
        return recon, indices, cb_loss, commit_loss

    # ---- numpy-boundary inference API -------------------------------------

    def _check_dims(self, height: int, width: int) -> None:
        if height % self.cfg.d or width % self.cfg.d:
            raise ValueError(
                f"image {width}x{height} is not a multiple of d={self.cfg.d}"
            )

    @torch.no_grad()
    def encode_color_image(self, image: ColorImage) -> FeatureMap:
        self._check_dims(image.height, image.width)
        self.eval()
        x = torch.from_numpy(image.rgb.copy()).float()
        x = x.permute(2, 0, 1)[None]
        feats = self.color_encoder(x)[0].permute(1, 2, 0)
        return FeatureMap(feats.numpy().astype(np.float64))

    @torch.no_grad()
    def encode_gray_image(self, image: GrayImage) -> FeatureMap:
        self._check_dims(image.height, image.width)
        self.eval()
        x = torch.from_numpy(image.luma.copy()).float()[None, None]
        feats = self.gray_encoder(x)[0].permute(1, 2, 0)
        out = feats
        if self.gray_quantizer is not None:
            quantized, _, _, _ = self.gray_quantizer(feats.permute(2, 0, 1)[None])
            out = quantized[0].permute(1, 2, 0)
        return FeatureMap(out.numpy().astype(np.float64))

    def codebook(self) -> Codebook:
        return Codebook(self.quantizer.embedding.weight.detach().numpy().astype(np.float64))

    def tokenize_image(self, image: ColorImage) -> TokenGrid:
        return tokenize(self.encode_color_image(image), self.codebook())

    @torch.no_grad()
    def decode_features(self, color_feats: FeatureMap, gray_feats: FeatureMap) -> ColorImage:
        if (color_feats.rows, color_feats.cols) != (gray_feats.rows, gray_feats.cols):
            raise ValueError("color and gray feature maps must share a shape")
        self.eval()
        cf = torch.from_numpy(color_feats.values.copy()).float()
        gf = torch.from_numpy(gray_feats.values.copy()).float()
        cf = cf.permute(2, 0, 1)[None]
        gf = gf.permute(2, 0, 1)[None]
        out = self.decoder(cf, gf)[0].permute(1, 2, 0).numpy()
        return ColorImage(np.clip(out.astype(np.float64), 0.0, 1.0))

    def decode_tokens(self, tokens: TokenGrid, gray_feats: FeatureMap) -> ColorImage:
        return self.decode_features(detokenize(tokens, self.codebook()), gray_feats)

    def reconstruct(self, image: ColorImage, gray: GrayImage) -> ColorImage:
        tokens = self.tokenize_image(image)
        return self.decode_tokens(tokens, self.encode_gray_image(gray))


def swap_color_source(
    gray: GrayImage, alt_color: ColorImage, model: ChromaVqgan
) -> ColorImage:
    """Decode alternate color tokens against the structure of another gray image."""
    if (alt_color.height, alt_color.width) != (gray.height, gray.width):
        raise ValueError("alternate color image must match the gray image's size")
    tokens = model.tokenize_image(alt_color)
    return model.decode_tokens(tokens, model.encode_gray_image(gray))


def build_model(cfg: VqganConfig) -> ChromaVqgan:
    """Construct a model with seed-determined initial weights."""
    torch.manual_seed(cfg.seed)
    return ChromaVqgan(cfg)
