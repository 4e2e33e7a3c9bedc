"""Single-file checkpoint archives with a config fingerprint.

An archive stores the config that built the network, a fingerprint of that
config, the model weights, and whatever training state is needed to resume
(optimizer, RNG states, step counter, metric history).  Loading re-derives
the fingerprint and refuses archives whose config was edited after saving.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import torch

SCHEMA_VERSION = 1


def config_fingerprint(config: dict) -> str:
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def save_archive(path, kind: str, config: dict, model_state: dict, extra: dict | None = None) -> None:
    payload = {
        "schema": SCHEMA_VERSION,
        "kind": kind,
        "config": config,
        "fingerprint": config_fingerprint(config),
        "model_state": model_state,
        "extra": extra or {},
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    torch.save(payload, path)


def load_archive(path, expected_kind: str) -> dict:
    payload = torch.load(Path(path), map_location="cpu", weights_only=False)
    if payload.get("schema") != SCHEMA_VERSION:
        raise ValueError(f"unsupported checkpoint schema: {payload.get('schema')}")
    if payload.get("kind") != expected_kind:
        raise ValueError(
            f"checkpoint kind {payload.get('kind')!r} does not match {expected_kind!r}"
        )
    if config_fingerprint(payload["config"]) != payload["fingerprint"]:
        raise ValueError("checkpoint fingerprint does not match its config")
    return payload
