"""Adversarial reconstruction training for the dual-encoder VQ autoencoder.

The generator objective is MSE reconstruction plus codebook and commitment
terms; a patch discriminator joins with a hinge loss once the configured
warm-up step has passed.  Training is deterministic per seed and can be
resumed bit-exactly from a checkpoint because optimizer and RNG states are
stored alongside the weights.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import torch
from torch import nn

from ..checkpoints import config_fingerprint, load_archive, save_archive
from ..core import ColorImage, to_grayscale
from .model import ChromaVqgan, PatchDiscriminator, VqganConfig


class TrainingDiverged(RuntimeError):
    """Raised when a loss becomes non-finite."""


@dataclass
class VqganTrainRecord:
    model: ChromaVqgan
    config: VqganConfig
    loss_rows: list[dict]
    psnr_history: list[tuple[int, float]]
    initial_disc_state: dict
    final_disc_state: dict


def _to_tensors(images: Sequence[ColorImage]) -> tuple[torch.Tensor, torch.Tensor]:
    colors = torch.stack(
        [torch.from_numpy(img.rgb.copy()).float().permute(2, 0, 1) for img in images]
    )
    grays = torch.stack(
        [
            torch.from_numpy(to_grayscale(img).luma.copy()).float()[None]
            for img in images
        ]
    )
    return colors, grays


@torch.no_grad()
def heldout_psnr(model: ChromaVqgan, colors: torch.Tensor, grays: torch.Tensor) -> float:
    recon, _, _, _ = model(colors, grays)
    mse = torch.mean((recon.clamp(0, 1) - colors) ** 2, dim=(1, 2, 3))
    mse = torch.clamp(mse, min=1e-12)
    return float((-10.0 * torch.log10(mse)).mean())


def _build_networks(cfg: VqganConfig) -> tuple[ChromaVqgan, PatchDiscriminator]:
    torch.manual_seed(cfg.seed)
    return ChromaVqgan(cfg), PatchDiscriminator()


# steps may grow when resuming; everything else must match
_RESUME_MUTABLE = {"steps", "eval_every"}


def _resume_compatible(old: dict, new: dict) -> bool:
    strip = lambda d: {k: v for k, v in d.items() if k not in _RESUME_MUTABLE}
    return config_fingerprint(strip(old)) == config_fingerprint(strip(new))


def train_vqgan(
    dataset: Sequence[ColorImage],
    cfg: VqganConfig,
    heldout: Sequence[ColorImage] | None = None,
    out_path=None,
    resume_from=None,
    log_path=None,
) -> VqganTrainRecord:
    if len(dataset) == 0:
        raise ValueError("empty dataset")
    if heldout is None:
        n_val = min(8, max(1, len(dataset) // 10))
        if len(dataset) > n_val:
            heldout = dataset[-n_val:]
            dataset = dataset[:-n_val]
        else:
            heldout = dataset

    model, disc = _build_networks(cfg)
    initial_disc_state = {k: v.clone() for k, v in disc.state_dict().items()}
    opt_g = torch.optim.Adam(model.parameters(), lr=cfg.lr, betas=(0.9, 0.95))
    opt_d = torch.optim.Adam(disc.parameters(), lr=cfg.lr, betas=(0.5, 0.9))
    rng = np.random.default_rng(cfg.seed)
    start_step = 0
    loss_rows: list[dict] = []
    psnr_history: list[tuple[int, float]] = []

    if resume_from is not None:
        payload = load_archive(resume_from, "vqgan")
        if not _resume_compatible(payload["config"], cfg.to_dict()):
            raise ValueError("resume checkpoint was trained with a different config")
        model.load_state_dict(payload["model_state"])
        extra = payload["extra"]
        disc.load_state_dict(extra["disc_state"])
        opt_g.load_state_dict(extra["opt_g"])
        opt_d.load_state_dict(extra["opt_d"])
        rng.bit_generator.state = extra["np_rng"]
        torch.set_rng_state(extra["torch_rng"])
        start_step = extra["step"]
        loss_rows = list(extra.get("loss_rows", []))
        psnr_history = [tuple(x) for x in extra.get("psnr_history", [])]

    colors, grays = _to_tensors(dataset)
    val_colors, val_grays = _to_tensors(heldout)
    eval_every = cfg.eval_every or max(1, cfg.steps // 8)

    if start_step == 0:
        psnr_history.append((0, heldout_psnr(model, val_colors, val_grays)))

    n = colors.shape[0]
    for step in range(start_step, cfg.steps):
        idx = rng.choice(n, size=min(cfg.batch_size, n), replace=n < cfg.batch_size)
        batch_c = colors[idx]
        batch_g = grays[idx]

        recon, _, cb_loss, commit_loss = model(batch_c, batch_g)
        recon_loss = torch.mean((recon - batch_c) ** 2)
        loss = recon_loss + cb_loss + cfg.commitment_weight * commit_loss
        use_disc = step >= cfg.disc_warmup_steps
        if use_disc:
            g_adv = -disc(recon).mean()
            loss = loss + cfg.gan_weight * g_adv
        else:
            g_adv = torch.zeros(())
        if not torch.isfinite(loss):
            raise TrainingDiverged(
                f"non-finite generator loss at step {step}: recon={float(recon_loss.detach())} "
                f"codebook={float(cb_loss.detach())} commit={float(commit_loss.detach())}"
            )
        opt_g.zero_grad(set_to_none=True)
        loss.backward()
        opt_g.step()

        d_loss_val = 0.0
        if use_disc:
            real_score = disc(batch_c)
            fake_score = disc(recon.detach())
            d_loss = nn.functional.relu(1.0 - real_score).mean() + nn.functional.relu(
                1.0 + fake_score
            ).mean()
            if not torch.isfinite(d_loss):
                raise TrainingDiverged(f"non-finite discriminator loss at step {step}")
            opt_d.zero_grad(set_to_none=True)
            d_loss.backward()
            opt_d.step()
            d_loss_val = float(d_loss.detach())

        loss_rows.append(
            {
                "step": step,
                "loss": float(loss.detach()),
                "recon": float(recon_loss.detach()),
                "codebook": float(cb_loss.detach()),
                "commit": float(commit_loss.detach()),
                "g_adv": float(g_adv.detach()),
                "d": d_loss_val,
            }
        )
        if (step + 1) % eval_every == 0 or step + 1 == cfg.steps:
            psnr_history.append((step + 1, heldout_psnr(model, val_colors, val_grays)))

    if log_path is not None:
        import json

        with open(log_path, "w") as f:
            for row in loss_rows:
                f.write(json.dumps(row) + "\n")

    if out_path is not None:
        save_vqgan(out_path, model, disc, opt_g, opt_d, rng, cfg, cfg.steps, loss_rows, psnr_history)
    return VqganTrainRecord(
        model=model,
        config=cfg,
        loss_rows=loss_rows,
        psnr_history=psnr_history,
        initial_disc_state=initial_disc_state,
        final_disc_state=disc.state_dict(),
    )


def save_vqgan(path, model, disc, opt_g, opt_d, rng, cfg, step, loss_rows, psnr_history) -> None:
    save_archive(
        path,
        "vqgan",
        cfg.to_dict(),
        model.state_dict(),
        extra={
            "disc_state": disc.state_dict(),
            "opt_g": opt_g.state_dict(),
            "opt_d": opt_d.state_dict(),
            "np_rng": rng.bit_generator.state,
            "torch_rng": torch.get_rng_state(),
            "step": step,
            "loss_rows": loss_rows,
            "psnr_history": [list(x) for x in psnr_history],
        },
    )


def load_vqgan(path) -> ChromaVqgan:
    payload = load_archive(path, "vqgan")
    cfg = VqganConfig(**payload["config"])
    model = ChromaVqgan(cfg)
    model.load_state_dict(payload["model_state"])
    model.eval()
    return model


def save_vqgan_model(path, model: ChromaVqgan) -> None:
    """Save just the weights (inference archive, not resumable)."""
    save_archive(path, "vqgan", model.cfg.to_dict(), model.state_dict())
