"""Metrics harness and paired ablations.

Computes colorfulness / PSNR / SSIM over a held-out split, shows the
plug-in slot for FID-style metrics, and runs the reconstruction ablation
(gray branch quantized vs kept continuous).
Run: python demos/05_metrics_and_ablations.py
"""

from pathlib import Path

from unicolor.pipeline import (
    generate_dataset,
    register_metric_plugin,
    run_ablation,
    run_eval,
)
from unicolor.vqgan import VqganConfig, load_vqgan

CKPT = Path("demo_out/train")
vqgan = load_vqgan(CKPT / "vqgan.pt")
size = 64 if vqgan.cfg.d == 8 else 16

heldout = generate_dataset(32, size=size, seed=99, align=vqgan.cfg.d)

report = run_eval(heldout, ["colorfulness", "psnr", "ssim", "fid"], vqgan=vqgan)
print("metrics without an fid plug-in:")
print(report.to_json())

# a stand-in plug-in: any callable over (originals, generated) works; real
# deployments wrap a pretrained feature extractor here
register_metric_plugin("fid", lambda originals, generated: 0.0)
report = run_eval(heldout[:8], ["fid"], vqgan=vqgan)
print("with a registered plug-in:", report.metrics)

print("\nreconstruction ablation (takes a few minutes the first time):")
ab_cfg = VqganConfig(d=vqgan.cfg.d, codebook_size=128, code_dim=32, channels=32,
                     steps=400, batch_size=8, disc_warmup_steps=350, seed=0)
train = generate_dataset(256, size=size, seed=1, align=vqgan.cfg.d)
result = run_ablation("chroma_vs_quant_vqgan", train, heldout[:16], ab_cfg,
                      workdir="demo_out/ablations")
print(result.to_json())
