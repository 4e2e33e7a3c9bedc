"""Command-line front door: training, hint conversion, sampling, eval, serve.

Exit codes: 0 ok, 1 runtime failure, 2 usage/config error.  Every failure
prints a single machine-parseable line ``error[<kind>]: message`` to stderr.

File formats:
  strokes JSON  -- [{"points": [[x, y], ...], "rgb": [r, g, b], "width": w}, ...]
  region JSON   -- {"cells": [[row, col], ...]} or {"rect": [r0, c0, r1, c1]} (inclusive)
  hints JSON    -- the hint-set document produced by `unicolor hints`
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields
from pathlib import Path

import numpy as np


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error[usage]: {message}\n")
        sys.exit(2)


def _load_yaml(path) -> dict:
    import yaml

    try:
        with open(path) as f:
            doc = yaml.safe_load(f)
    except FileNotFoundError:
        raise UsageError(f"config file not found: {path}")
    except yaml.YAMLError as exc:
        raise UsageError(f"invalid YAML in {path}: {exc}")
    if not isinstance(doc, dict):
        raise UsageError(f"config {path} must be a mapping")
    return doc


def _dataset_from_config(doc: dict, config_path, cell_size: int | None):
    from .pipeline import DatasetSpec, load_split

    ds = doc.get("dataset")
    if not isinstance(ds, dict) or "root" not in ds:
        raise UsageError(f"{config_path}: missing key dataset.root")
    spec = DatasetSpec(
        root=Path(ds["root"]),
        split=ds.get("split", "train"),
        resize_to=int(ds.get("resize_to", 74)),
        crop_to=int(ds.get("crop_to", 64)),
        hflip=bool(ds.get("hflip", True)),
        seed=int(ds.get("seed", 0)),
        cell_size=cell_size,
    )
    return load_split(spec)


def _filter_fields(doc: dict, cls, aliases: dict[str, str] | None = None) -> dict:
    aliases = aliases or {}
    names = {f.name for f in fields(cls)}
    out = {}
    for key, value in doc.items():
        name = aliases.get(key, key)
        if name in names:
            out[name] = value
    return out


def cmd_make_dataset(args) -> int:
    from .pipeline import write_dataset

    write_dataset(args.root, args.train, args.val, size=args.size, seed=args.seed)
    print(f"wrote {args.train}+{args.val} images under {args.root}")
    return 0


def cmd_train_vqgan(args) -> int:
    from .vqgan import VqganConfig, train_vqgan

    doc = _load_yaml(args.config)
    try:
        cfg = VqganConfig(**_filter_fields(doc, VqganConfig))
    except (TypeError, ValueError) as exc:
        raise UsageError(f"{args.config}: {exc}")
    if args.steps is not None:
        from dataclasses import replace

        cfg = replace(cfg, steps=args.steps)
    images = _dataset_from_config(doc, args.config, cfg.d)
    record = train_vqgan(
        images, cfg, out_path=args.out, resume_from=args.resume, log_path=args.log
    )
    last = record.psnr_history[-1]
    print(f"trained {cfg.steps} steps; held-out psnr {last[1]:.2f} dB; checkpoint {args.out}")
    return 0


def cmd_train_transformer(args) -> int:
    from dataclasses import replace

    from .transformer import TransformerConfig, train_transformer
    from .vqgan import load_vqgan

    doc = _load_yaml(args.config)
    vqgan = load_vqgan(args.vqgan)
    try:
        cfg = TransformerConfig(
            **_filter_fields(doc, TransformerConfig, aliases={"L": "length"})
        )
    except (TypeError, ValueError) as exc:
        raise UsageError(f"{args.config}: {exc}")
    cfg = replace(cfg, codebook_size=vqgan.cfg.codebook_size, code_dim=vqgan.cfg.code_dim)
    if args.steps is not None:
        cfg = replace(cfg, steps=args.steps)
    images = _dataset_from_config(doc, args.config, vqgan.cfg.d)
    record = train_transformer(
        images, vqgan, cfg, out_path=args.out, resume_from=args.resume, log_path=args.log
    )
    step, ce, acc = record.eval_history[-1]
    print(
        f"trained {cfg.steps} steps; held-out masked ce {ce:.3f}, acc {acc:.3f}; "
        f"checkpoint {args.out}"
    )
    return 0


def _load_strokes(path):
    from .conditions import Stroke

    try:
        doc = json.loads(Path(path).read_text())
        return [Stroke.from_dict(s) for s in doc]
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"invalid strokes file {path}: {exc}")


def cmd_hints(args) -> int:
    from .convert import NoConditionsError, TextParseError, conditions_to_hints
    from .core import CellGrid, center_crop_to_multiple, load_color_png, load_gray_png

    gray = load_gray_png(args.image)
    gray = center_crop_to_multiple(gray, args.cell_size)
    grid = CellGrid.for_image(gray.height, gray.width, args.cell_size)
    strokes = _load_strokes(args.strokes) if args.strokes else []
    exemplar = None
    if args.exemplar:
        exemplar = load_color_png(args.exemplar)
    try:
        hints = conditions_to_hints(
            gray, grid, strokes=strokes, exemplar=exemplar, text=args.text
        )
    except TextParseError as exc:
        raise UsageError(str(exc))
    except NoConditionsError as exc:
        raise UsageError(str(exc))
    Path(args.output).write_text(hints.to_json())
    print(f"{len(hints)} hints -> {args.output}")
    return 0


def _load_models(args):
    from .transformer import load_transformer
    from .vqgan import load_vqgan

    vqgan = load_vqgan(args.vqgan)
    transformer, _ = load_transformer(args.transformer)
    return vqgan, transformer


def _load_hints(path):
    from .core import HintSet

    try:
        return HintSet.from_json(Path(path).read_text())
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"invalid hints file {path}: {exc}")


def cmd_colorize(args) -> int:
    from .core import center_crop_to_multiple, load_gray_png
    from .sampler import SamplerConfig, colorize, save_result

    vqgan, transformer = _load_models(args)
    gray = center_crop_to_multiple(load_gray_png(args.image), vqgan.cfg.d)
    hints = _load_hints(args.hints) if args.hints else None
    cfg = SamplerConfig(
        top_k=args.top_k, temperature=args.temperature, num_samples=args.n, seed=args.seed
    )
    result = colorize(gray, hints, vqgan, transformer, cfg)
    paths = save_result(result, args.output)
    print(f"wrote {len(paths)} samples to {args.output}")
    return 0


def _load_region(path, grid):
    from .core import RegionMask

    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, ValueError) as exc:
        raise UsageError(f"invalid region file {path}: {exc}")
    if "cells" in doc:
        cells = [tuple(c) for c in doc["cells"]]
    elif "rect" in doc:
        r0, c0, r1, c1 = doc["rect"]
        cells = [(r, c) for r in range(r0, r1 + 1) for c in range(c0, c1 + 1)]
    else:
        raise UsageError(f"region file {path} needs a 'cells' or 'rect' key")
    try:
        return RegionMask.from_cells(grid, cells)
    except ValueError as exc:
        raise UsageError(str(exc))


def cmd_recolorize(args) -> int:
    from .core import CellGrid, center_crop_to_multiple, load_color_png
    from .sampler import SamplerConfig, recolorize, save_result

    vqgan, transformer = _load_models(args)
    image = center_crop_to_multiple(load_color_png(args.image), vqgan.cfg.d)
    grid = CellGrid.for_image(image.height, image.width, vqgan.cfg.d)
    region = _load_region(args.region, grid)
    hints = _load_hints(args.hints) if args.hints else None
    cfg = SamplerConfig(
        top_k=args.top_k, temperature=args.temperature, num_samples=args.n, seed=args.seed
    )
    result = recolorize(image, region, hints, vqgan, transformer, cfg)
    paths = save_result(result, args.output)
    print(f"wrote {len(paths)} samples to {args.output}")
    return 0


def cmd_eval(args) -> int:
    from .pipeline import DatasetSpec, load_split, run_eval
    from .vqgan import load_vqgan

    vqgan = load_vqgan(args.vqgan) if args.vqgan else None
    spec = DatasetSpec(
        root=Path(args.dataset),
        split=args.split,
        resize_to=args.size,
        crop_to=args.size,
        hflip=False,
        seed=0,
        cell_size=vqgan.cfg.d if vqgan else None,
    )
    images = load_split(spec)
    metrics = [m.strip() for m in args.metrics.split(",") if m.strip()]
    try:
        report = run_eval(images, metrics, vqgan=vqgan)
    except ValueError as exc:
        raise UsageError(str(exc))
    Path(args.output).write_text(report.to_json())
    print(report.to_json())
    return 0


def cmd_ablate(args) -> int:
    from .pipeline.ablations import run_ablation_from_yaml

    try:
        report = run_ablation_from_yaml(args.config, workdir=args.workdir)
    except (ValueError, KeyError) as exc:
        raise UsageError(str(exc))
    Path(args.output).write_text(report.to_json())
    print(report.to_json())
    return 0


def cmd_serve(args) -> int:
    import os

    import uvicorn

    from .service import ServiceConfig, create_app

    if args.vqgan:
        os.environ["UNICOLOR_VQGAN_CKPT"] = str(args.vqgan)
    if args.transformer:
        os.environ["UNICOLOR_TR_CKPT"] = str(args.transformer)
    config = ServiceConfig.from_env(args.data_dir)
    app = create_app(config=config)
    port = args.port or int(os.environ.get("UNICOLOR_PORT", "8411"))
    uvicorn.run(app, host=args.host, port=port)
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="unicolor", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("make-dataset", help="write a procedural dataset")
    p.add_argument("--root", required=True)
    p.add_argument("--train", type=int, default=2000)
    p.add_argument("--val", type=int, default=64)
    p.add_argument("--size", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_make_dataset)

    p = sub.add_parser("train-vqgan", help="train the chroma tokenizer")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--resume", default=None)
    p.add_argument("--log", default=None)
    p.set_defaults(func=cmd_train_vqgan)

    p = sub.add_parser("train-transformer", help="train the masked color model")
    p.add_argument("--config", required=True)
    p.add_argument("--vqgan", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--resume", default=None)
    p.add_argument("--log", default=None)
    p.set_defaults(func=cmd_train_transformer)

    p = sub.add_parser("hints", help="convert conditions to a hint-set JSON")
    p.add_argument("--image", required=True)
    p.add_argument("--strokes", default=None)
    p.add_argument("--exemplar", default=None)
    p.add_argument("--text", default=None)
    p.add_argument("--cell-size", type=int, default=8)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_hints)

    p = sub.add_parser("colorize", help="sample colorizations for a gray image")
    p.add_argument("--image", required=True)
    p.add_argument("--hints", default=None)
    p.add_argument("--vqgan", required=True)
    p.add_argument("--transformer", required=True)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--top-k", type=int, default=100)
    p.add_argument("--temperature", type=float, default=1.0)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_colorize)

    p = sub.add_parser("recolorize", help="resample a region of a color image")
    p.add_argument("--image", required=True)
    p.add_argument("--region", required=True)
    p.add_argument("--hints", default=None)
    p.add_argument("--vqgan", required=True)
    p.add_argument("--transformer", required=True)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--top-k", type=int, default=100)
    p.add_argument("--temperature", type=float, default=1.0)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_recolorize)

    p = sub.add_parser("eval", help="compute metrics over a dataset split")
    p.add_argument("--dataset", required=True)
    p.add_argument("--split", default="val")
    p.add_argument("--size", type=int, default=64)
    p.add_argument("--vqgan", default=None)
    p.add_argument("--metrics", default="colorfulness")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("ablate", help="run a paired ablation from a YAML config")
    p.add_argument("--config", required=True)
    p.add_argument("--workdir", default="ablations")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--vqgan", default=None)
    p.add_argument("--transformer", default=None)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--data-dir", default=None)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    import torch

    torch.set_num_threads(max(1, torch.get_num_threads()))
    np.seterr(all="ignore")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error[usage]: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - single runtime error surface
        print(f"error[runtime]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
