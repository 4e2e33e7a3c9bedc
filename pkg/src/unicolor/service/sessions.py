"""On-disk session store: JSON state plus PNG artifacts per session.

A session tracks a base image and an append-only edit history.  Every history
entry records the resolved hints, the region, the sampler settings and the
chosen sample, which is exactly enough to replay the whole session
deterministically against the same checkpoints.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from pathlib import Path

import numpy as np

from ..core import (
    ColorImage,
    HintSet,
    RegionMask,
    color_from_png_bytes,
    gray_from_png_bytes,
    png_bytes,
)


class SessionNotFound(KeyError):
    pass


def composite_region(base: ColorImage, sampled: ColorImage, region: RegionMask) -> ColorImage:
    """Keep base pixels outside the region; edits stay strictly local even
    though the decoder's receptive field crosses cell borders."""
    d = region.grid.cell_size
    pixel_mask = np.repeat(np.repeat(region.selected, d, axis=0), d, axis=1)
    return ColorImage(np.where(pixel_mask[..., None], sampled.rgb, base.rgb))


def _is_grayscale(image: ColorImage) -> bool:
    rgb = image.rgb
    return bool(
        np.array_equal(rgb[..., 0], rgb[..., 1]) and np.array_equal(rgb[..., 1], rgb[..., 2])
    )


class SessionStore:
    def __init__(self, root: Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def _lock_for(self, session_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(session_id, threading.Lock())

    def _dir(self, session_id: str) -> Path:
        return self.root / session_id

    def _state_path(self, session_id: str) -> Path:
        return self._dir(session_id) / "session.json"

    def create(self, image_png: bytes) -> dict:
        session_id = uuid.uuid4().hex
        folder = self._dir(session_id)
        folder.mkdir(parents=True)
        image = color_from_png_bytes(image_png)
        (folder / "base.png").write_bytes(image_png)
        state = {
            "id": session_id,
            "base_is_gray": _is_grayscale(image),
            "history": [],
            "current": None,  # file name of the selected result
            "created_at": time.time(),
            "updated_at": time.time(),
        }
        self._write(session_id, state)
        return state

    def _write(self, session_id: str, state: dict) -> None:
        state["updated_at"] = time.time()
        self._state_path(session_id).write_text(json.dumps(state, indent=2))

    def get(self, session_id: str) -> dict:
        path = self._state_path(session_id)
        if not path.exists():
            raise SessionNotFound(session_id)
        return json.loads(path.read_text())

    def base_image(self, session_id: str) -> ColorImage:
        return color_from_png_bytes((self._dir(session_id) / "base.png").read_bytes())

    def base_gray(self, session_id: str):
        return gray_from_png_bytes((self._dir(session_id) / "base.png").read_bytes())

    def current_image(self, session_id: str) -> ColorImage | None:
        state = self.get(session_id)
        if state["current"] is not None:
            return color_from_png_bytes(
                (self._dir(session_id) / state["current"]).read_bytes()
            )
        if not state["base_is_gray"]:
            return self.base_image(session_id)
        return None

    def record_selection(
        self,
        session_id: str,
        kind: str,
        hints: HintSet | None,
        region: RegionMask | None,
        sampler_config: dict,
        chosen_index: int,
        image: ColorImage,
        conditions: dict | None = None,
    ) -> dict:
        """Append one (conditions, region, chosen sample) step and store its PNG."""
        with self._lock_for(session_id):
            state = self.get(session_id)
            step = len(state["history"])
            name = f"step_{step:03d}.png"
            (self._dir(session_id) / name).write_bytes(png_bytes(image))
            entry = {
                "kind": kind,
                "hints": hints.to_dict() if hints is not None else None,
                "region_cells": region.cells() if region is not None else None,
                "sampler": sampler_config,
                "chosen_index": chosen_index,
                "conditions": conditions,
                "result": name,
            }
            state["history"].append(entry)
            state["current"] = name
            self._write(session_id, state)
            return entry

    def result_bytes(self, session_id: str, name: str) -> bytes:
        path = self._dir(session_id) / name
        if not path.exists():
            raise SessionNotFound(f"{session_id}/{name}")
        return path.read_bytes()


def replay_session(store: SessionStore, session_id: str, vqgan, model) -> bytes:
    """Re-run the session's history; returns the final PNG bytes."""
    from ..core import CellGrid, to_grayscale
    from ..sampler import SamplerConfig, colorize, recolorize

    state = store.get(session_id)
    if not state["history"]:
        raise ValueError("session has no history to replay")
    base = store.base_image(session_id)
    gray = to_grayscale(base)
    grid = CellGrid.for_image(base.height, base.width, vqgan.cfg.d)
    current: ColorImage | None = None if state["base_is_gray"] else base
    current_png: bytes | None = None
    for entry in state["history"]:
        hints = HintSet.from_dict(entry["hints"]) if entry["hints"] else None
        cfg = SamplerConfig(**entry["sampler"])
        if entry["kind"] == "colorize":
            result = colorize(gray, hints, vqgan, model, cfg)
            chosen = result.images[entry["chosen_index"]]
        else:
            if current is None:
                raise ValueError("recolorize step without a base color image")
            region = RegionMask.from_cells(
                grid, [tuple(c) for c in entry["region_cells"]]
            )
            result = recolorize(current, region, hints, vqgan, model, cfg)
            chosen = composite_region(current, result.images[entry["chosen_index"]], region)
        # the live pipeline stores each selection as a PNG and feeds the
        # decoded (8-bit) pixels into the next step; replay must match that
        current_png = png_bytes(chosen)
        current = color_from_png_bytes(current_png)
    return current_png
