"""Train both networks on the procedural dataset, then sample diverse
colorizations with and without hints.

Writes checkpoints and galleries to demo_out/train/. Takes ~15 minutes on
one CPU core at the default sizes; pass --quick for a 2-minute miniature.
Run: python demos/02_train_and_sample.py [--quick]
"""

import sys
from pathlib import Path

from unicolor.core import CellGrid, HintPoint, HintSet, HintSource, save_png, to_grayscale
from unicolor.pipeline import generate_dataset
from unicolor.sampler import SamplerConfig, diverse_batch, save_result
from unicolor.transformer import TransformerConfig, train_transformer
from unicolor.vqgan import VqganConfig, train_vqgan

OUT = Path("demo_out/train")
OUT.mkdir(parents=True, exist_ok=True)
quick = "--quick" in sys.argv

if quick:
    vq_cfg = VqganConfig(d=4, codebook_size=64, code_dim=16, channels=16,
                         steps=300, batch_size=4, disc_warmup_steps=250, seed=0)
    tr_cfg = TransformerConfig(layers=2, heads=2, d_e=64, length=16,
                               codebook_size=64, code_dim=16, steps=300,
                               batch_size=8, seed=0)
    size = 16
    images = generate_dataset(256, size=size, seed=1, align=4)
else:
    vq_cfg = VqganConfig(steps=2200, disc_warmup_steps=1800)
    tr_cfg = TransformerConfig(steps=2000)
    size = 64
    images = generate_dataset(2000, size=size, seed=1)

train, heldout = images[:-32], images[-32:]

print("training the chroma tokenizer ...")
vq_record = train_vqgan(train, vq_cfg, heldout=heldout, out_path=OUT / "vqgan.pt")
for step, value in vq_record.psnr_history:
    print(f"  step {step:5d}  held-out psnr {value:6.2f} dB")

print("training the masked color model ...")
tr_record = train_transformer(train, vq_record.model, tr_cfg, heldout=heldout,
                              out_path=OUT / "transformer.pt")
for step, ce, acc in tr_record.eval_history:
    print(f"  step {step:5d}  masked ce {ce:5.3f}  top-1 acc {acc:5.3f}")

gray = to_grayscale(heldout[0])
save_png(gray, OUT / "input_gray.png")

top_k = min(100, vq_cfg.codebook_size)
print("unconditional: four diverse samples")
free = diverse_batch(gray, None, vq_record.model, tr_record.model,
                     SamplerConfig(num_samples=4, seed=7, top_k=top_k))
save_result(free, OUT / "unconditional")
print(f"  mean pairwise token distance: {free.diversity:.3f}")

print("hinted: same image, two cells pinned to opposite hues")
grid = CellGrid.for_image(size, size, vq_cfg.d)
hints = HintSet(grid, (
    HintPoint(1, 1, (0.95, 0.28, 0.05), HintSource.MANUAL),
    HintPoint(grid.rows - 2, grid.cols - 2, (0.40, 0.38, 0.95), HintSource.MANUAL),
))
pinned = diverse_batch(gray, hints, vq_record.model, tr_record.model,
                       SamplerConfig(num_samples=4, seed=7, top_k=top_k))
save_result(pinned, OUT / "hinted")
print(f"galleries under {OUT}/unconditional and {OUT}/hinted")
