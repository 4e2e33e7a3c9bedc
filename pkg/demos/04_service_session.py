"""Drive the HTTP API end to end: session, colorize, select, recolorize,
replay. Uses the in-process test client so no server needs to be running,
but the same requests work against `unicolor serve`.

Needs the checkpoints from demos/02_train_and_sample.py.
Run: python demos/04_service_session.py
"""

import base64
import tempfile
import time
from pathlib import Path

import numpy as np
from fastapi.testclient import TestClient

from unicolor.core import ColorImage, png_bytes, to_grayscale
from unicolor.pipeline import generate_dataset
from unicolor.service import ServiceConfig, create_app
from unicolor.transformer import load_transformer
from unicolor.vqgan import load_vqgan

CKPT = Path("demo_out/train")
vqgan = load_vqgan(CKPT / "vqgan.pt")
model, _ = load_transformer(CKPT / "transformer.pt")
d = vqgan.cfg.d
size = int(np.sqrt(model.cfg.length)) * d

app = create_app(vqgan, model, ServiceConfig(data_dir=Path(tempfile.mkdtemp())))
client = TestClient(app)


def wait(job_id):
    while True:
        doc = client.get(f"/v1/jobs/{job_id}").json()
        if doc["state"] in ("done", "failed"):
            return doc
        time.sleep(0.1)


scene = generate_dataset(1, size=size, seed=5, align=d)[0]
gray = to_grayscale(scene)
gray_b64 = base64.b64encode(
    png_bytes(ColorImage(np.repeat(gray.luma[..., None], 3, axis=2)))
).decode()

session = client.post("/v1/sessions", json={"image_png_b64": gray_b64}).json()
sid = session["id"]
print("session", sid)

top_k = min(100, vqgan.cfg.codebook_size)
job = client.post("/v1/colorize", json={
    "image_png_b64": gray_b64,
    "session_id": sid,
    "sampler": {"num_samples": 4, "seed": 3, "top_k": top_k},
}).json()
done = wait(job["job_id"])
print("colorize done:", done["result"]["urls"])

client.post(f"/v1/sessions/{sid}/select", json={"job_id": job["job_id"], "index": 2})

job2 = client.post(f"/v1/sessions/{sid}/recolorize", json={
    "region_cells": [[r, c] for r in range(2) for c in range(2)],
    "conditions": {"strokes": [
        {"points": [[2, 4], [12, 4]], "rgb": [0.18, 0.64, 0.18], "width": 3}
    ]},
    "sampler": {"num_samples": 2, "seed": 9, "top_k": top_k},
}).json()
done2 = wait(job2["job_id"])
print("recolorize done:", done2["result"]["urls"])
client.post(f"/v1/sessions/{sid}/select", json={"job_id": job2["job_id"], "index": 0})

replay = client.post(f"/v1/sessions/{sid}/replay").json()
print("replay reproduces the final PNG byte-for-byte:", replay["match"])
