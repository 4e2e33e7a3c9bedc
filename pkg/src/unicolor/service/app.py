"""HTTP API for hint preview, colorization jobs and session editing.

Model compute is serialized through the bounded job queue; handlers stay
thin.  Images travel as base64 PNG inside JSON, and finished samples are also
exposed as direct PNG URLs.  Environment variables: UNICOLOR_VQGAN_CKPT,
UNICOLOR_TR_CKPT, UNICOLOR_PORT, UNICOLOR_QUEUE_DEPTH.
"""

from __future__ import annotations

import base64
import binascii
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException, Response
from pydantic import BaseModel, Field

from ..conditions import HintConversionError, Stroke
from ..convert import NoConditionsError, ProviderConfig, TextParseError, conditions_to_hints
from ..core import (
    CellGrid,
    ColorImage,
    GrayImage,
    HintSet,
    RegionMask,
    color_from_png_bytes,
    png_bytes,
    to_grayscale,
)
from ..sampler import SamplerConfig, colorize, recolorize
from ..transformer.train import load_transformer
from ..vqgan.train import load_vqgan
from .jobs import JobQueue, QueueFull
from .sessions import SessionNotFound, SessionStore, composite_region, replay_session

MAX_PIXELS_DEFAULT = 1 << 20  # ~1 megapixel upload cap


@dataclass
class ServiceConfig:
    data_dir: Path
    queue_depth: int = 8
    max_pixels: int = MAX_PIXELS_DEFAULT
    providers: ProviderConfig | None = None

    @classmethod
    def from_env(cls, data_dir=None) -> "ServiceConfig":
        return cls(
            data_dir=Path(data_dir or tempfile.mkdtemp(prefix="unicolor_service_")),
            queue_depth=int(os.environ.get("UNICOLOR_QUEUE_DEPTH", "8")),
        )


class StrokePayload(BaseModel):
    points: list[list[int]] = Field(min_length=1)
    rgb: list[float] = Field(min_length=3, max_length=3)
    width: int = 1


class ConditionsPayload(BaseModel):
    strokes: list[StrokePayload] = []
    exemplar_png_b64: str | None = None
    text: str | None = None

    def is_empty(self) -> bool:
        return not self.strokes and self.exemplar_png_b64 is None and not self.text


class SamplerPayload(BaseModel):
    top_k: int = 100
    temperature: float = 1.0
    num_samples: int = 1
    seed: int = 0

    def to_config(self) -> SamplerConfig:
        return SamplerConfig(
            top_k=self.top_k,
            temperature=self.temperature,
            num_samples=self.num_samples,
            seed=self.seed,
        )


class HintPreviewRequest(BaseModel):
    image_png_b64: str
    conditions: ConditionsPayload


class ColorizeRequest(BaseModel):
    image_png_b64: str
    conditions: ConditionsPayload | None = None
    sampler: SamplerPayload = SamplerPayload()
    session_id: str | None = None


class SessionCreateRequest(BaseModel):
    image_png_b64: str


class SelectRequest(BaseModel):
    job_id: str
    index: int


class RecolorizeRequest(BaseModel):
    region_cells: list[list[int]]
    conditions: ConditionsPayload | None = None
    sampler: SamplerPayload = SamplerPayload()


def _decode_png(b64: str, max_pixels: int) -> ColorImage:
    try:
        raw = base64.b64decode(b64, validate=True)
        image = color_from_png_bytes(raw)
    except (binascii.Error, OSError, ValueError) as exc:
        raise HTTPException(400, f"malformed PNG payload: {exc}") from exc
    if image.width * image.height > max_pixels:
        raise HTTPException(413, f"image exceeds the {max_pixels}-pixel limit")
    return image


def _overlay(gray: GrayImage, hints: HintSet) -> ColorImage:
    rgb = np.repeat(gray.luma[..., None], 3, axis=2).copy()
    d = hints.grid.cell_size
    for p in hints:
        rs, cs = hints.grid.cell_slices(p.row, p.col)
        rgb[rs, cs] = p.color
        rgb[rs.start, cs] = 0.0
        rgb[rs, cs.start] = 0.0
    return ColorImage(np.clip(rgb, 0.0, 1.0))


def create_app(
    vqgan=None,
    transformer=None,
    config: ServiceConfig | None = None,
) -> FastAPI:
    """Build the service; models may be passed directly or loaded from env paths."""
    config = config or ServiceConfig.from_env()
    providers = config.providers or ProviderConfig()
    if vqgan is None:
        path = os.environ.get("UNICOLOR_VQGAN_CKPT")
        if path:
            vqgan = load_vqgan(path)
    if transformer is None:
        path = os.environ.get("UNICOLOR_TR_CKPT")
        if path:
            transformer, _ = load_transformer(path)

    store = SessionStore(Path(config.data_dir) / "sessions")
    app = FastAPI(title="unicolor service", version="0.1.0", openapi_url="/v1/openapi")

    def _require_models() -> None:
        if vqgan is None or transformer is None:
            raise HTTPException(503, "model checkpoints not loaded")

    def _grid_for_image(height: int, width: int) -> CellGrid:
        d = vqgan.cfg.d if vqgan is not None else 8
        if height % d or width % d:
            raise HTTPException(400, f"image dimensions must be multiples of {d}")
        return CellGrid.for_image(height, width, d)

    def _convert(gray: GrayImage, grid: CellGrid, conditions: ConditionsPayload) -> HintSet:
        strokes = []
        for s in conditions.strokes:
            try:
                strokes.append(
                    Stroke(tuple((p[0], p[1]) for p in s.points), tuple(s.rgb), s.width)
                )
            except ValueError as exc:
                raise HTTPException(400, f"malformed stroke: {exc}") from exc
        exemplar = None
        if conditions.exemplar_png_b64 is not None:
            if providers.correspondence_provider == "none":
                raise HTTPException(501, "no correspondence provider configured for exemplars")
            exemplar = _decode_png(conditions.exemplar_png_b64, config.max_pixels)
        try:
            return conditions_to_hints(
                gray, grid, strokes=strokes, exemplar=exemplar,
                text=conditions.text, providers=providers,
            )
        except TextParseError as exc:
            raise HTTPException(422, str(exc)) from exc
        except NoConditionsError as exc:
            raise HTTPException(400, str(exc)) from exc
        except HintConversionError as exc:
            raise HTTPException(400, f"condition conversion failed: {exc}") from exc
        except ValueError as exc:
            raise HTTPException(400, f"malformed condition: {exc}") from exc

    def _worker(job) -> dict:
        payload = job.payload
        cfg: SamplerConfig = payload["sampler"]
        hints = payload.get("hints")

        def progress(done: int, total: int, _visible) -> None:
            chain = payload.setdefault("_chain", 0)
            job.progress_total = total * cfg.num_samples
            job.progress_done = min(job.progress_total, chain * total + done)
            if done == total:
                payload["_chain"] = chain + 1

        if job.kind == "colorize":
            result = colorize(
                payload["gray"], hints, vqgan, transformer, cfg, step_callback=progress
            )
            images = result.images
        else:
            base: ColorImage = payload["image"]
            region: RegionMask = payload["region"]
            result = recolorize(
                base, region, hints, vqgan, transformer, cfg, step_callback=progress
            )
            images = [composite_region(base, img, region) for img in result.images]
        job_dir = Path(config.data_dir) / "jobs" / job.id
        job_dir.mkdir(parents=True, exist_ok=True)
        names = []
        for i, img in enumerate(images):
            name = f"result_{i:02d}.png"
            (job_dir / name).write_bytes(png_bytes(img))
            names.append(name)
        return {
            "images": names,
            "urls": [f"/v1/jobs/{job.id}/results/{i}.png" for i in range(len(names))],
            "chain_seeds": result.chain_seeds,
            "hints": hints.to_dict() if hints is not None else None,
            "session_id": payload.get("session_id"),
            "region_cells": payload.get("region_cells"),
            "sampler": cfg.to_dict(),
            "kind": job.kind,
        }

    jobs = JobQueue(_worker, depth=config.queue_depth)
    app.state.jobs = jobs
    app.state.sessions = store
    app.state.vqgan = vqgan
    app.state.transformer = transformer

    @app.post("/v1/hints/preview")
    def hints_preview(req: HintPreviewRequest):
        if req.conditions.is_empty():
            raise HTTPException(400, "no conditions given")
        image = _decode_png(req.image_png_b64, config.max_pixels)
        gray = to_grayscale(image)
        grid = _grid_for_image(image.height, image.width)
        hints = _convert(gray, grid, req.conditions)
        overlay = _overlay(gray, hints)
        return {
            "hints": hints.to_dict(),
            "overlay_png_b64": base64.b64encode(png_bytes(overlay)).decode(),
        }

    @app.post("/v1/colorize", status_code=202)
    def colorize_endpoint(req: ColorizeRequest):
        _require_models()
        image = _decode_png(req.image_png_b64, config.max_pixels)
        gray = to_grayscale(image)
        grid = _grid_for_image(image.height, image.width)
        hints = None
        if req.conditions is not None and not req.conditions.is_empty():
            hints = _convert(gray, grid, req.conditions)
        if req.session_id is not None:
            try:
                store.get(req.session_id)
            except SessionNotFound:
                raise HTTPException(404, "unknown session") from None
        payload = {
            "gray": gray,
            "hints": hints,
            "sampler": req.sampler.to_config(),
            "session_id": req.session_id,
        }
        try:
            job = jobs.submit("colorize", payload)
        except QueueFull:
            raise HTTPException(409, "job queue is full, retry later") from None
        return {"job_id": job.id}

    @app.get("/v1/jobs/{job_id}")
    def job_status(job_id: str):
        job = jobs.get(job_id)
        if job is None:
            raise HTTPException(404, "unknown job")
        return job.status_dict()

    @app.get("/v1/jobs/{job_id}/results/{index}.png")
    def job_result(job_id: str, index: int):
        job = jobs.get(job_id)
        if job is None or job.state != "done":
            raise HTTPException(404, "unknown job or job not finished")
        path = Path(config.data_dir) / "jobs" / job_id / f"result_{index:02d}.png"
        if not path.exists():
            raise HTTPException(404, "no such sample")
        return Response(content=path.read_bytes(), media_type="image/png")

    @app.post("/v1/sessions", status_code=201)
    def create_session(req: SessionCreateRequest):
        image = _decode_png(req.image_png_b64, config.max_pixels)
        _grid_for_image(image.height, image.width)
        raw = base64.b64decode(req.image_png_b64)
        return store.create(raw)

    @app.get("/v1/sessions/{session_id}")
    def get_session(session_id: str):
        try:
            return store.get(session_id)
        except SessionNotFound:
            raise HTTPException(404, "unknown session") from None

    @app.get("/v1/sessions/{session_id}/images/{name}")
    def session_image(session_id: str, name: str):
        try:
            store.get(session_id)
            return Response(content=store.result_bytes(session_id, name), media_type="image/png")
        except SessionNotFound:
            raise HTTPException(404, "unknown session or image") from None

    @app.post("/v1/sessions/{session_id}/select")
    def select_result(session_id: str, req: SelectRequest):
        try:
            store.get(session_id)
        except SessionNotFound:
            raise HTTPException(404, "unknown session") from None
        job = jobs.get(req.job_id)
        if job is None or job.state != "done":
            raise HTTPException(404, "unknown job or job not finished")
        if job.result.get("session_id") != session_id:
            raise HTTPException(400, "job does not belong to this session")
        names = job.result["images"]
        if not (0 <= req.index < len(names)):
            raise HTTPException(400, "sample index out of range")
        image = color_from_png_bytes(
            (Path(config.data_dir) / "jobs" / job.id / names[req.index]).read_bytes()
        )
        hints = HintSet.from_dict(job.result["hints"]) if job.result["hints"] else None
        grid = _grid_for_image(image.height, image.width)
        region = None
        if job.result.get("region_cells"):
            region = RegionMask.from_cells(
                grid, [tuple(c) for c in job.result["region_cells"]]
            )
        entry = store.record_selection(
            session_id,
            kind=job.result["kind"],
            hints=hints,
            region=region,
            sampler_config=job.result["sampler"],
            chosen_index=req.index,
            image=image,
        )
        return {"session": store.get(session_id), "entry": entry}

    @app.post("/v1/sessions/{session_id}/recolorize", status_code=202)
    def recolorize_endpoint(session_id: str, req: RecolorizeRequest):
        _require_models()
        try:
            store.get(session_id)
        except SessionNotFound:
            raise HTTPException(404, "unknown session") from None
        current = store.current_image(session_id)
        if current is None:
            raise HTTPException(400, "session has no base color image; colorize and select first")
        grid = _grid_for_image(current.height, current.width)
        if not req.region_cells:
            raise HTTPException(400, "empty region")
        try:
            region = RegionMask.from_cells(grid, [tuple(c) for c in req.region_cells])
        except ValueError as exc:
            raise HTTPException(400, str(exc)) from None
        hints = None
        if req.conditions is not None and not req.conditions.is_empty():
            hints = _convert(to_grayscale(current), grid, req.conditions)
        payload = {
            "image": current,
            "region": region,
            "region_cells": region.cells(),
            "hints": hints,
            "sampler": req.sampler.to_config(),
            "session_id": session_id,
        }
        try:
            job = jobs.submit("recolorize", payload)
        except QueueFull:
            raise HTTPException(409, "job queue is full, retry later") from None
        return {"job_id": job.id}

    @app.post("/v1/sessions/{session_id}/replay")
    def replay_endpoint(session_id: str):
        _require_models()
        try:
            state = store.get(session_id)
        except SessionNotFound:
            raise HTTPException(404, "unknown session") from None
        if not state["history"]:
            raise HTTPException(400, "session has no history")
        replayed = replay_session(store, session_id, vqgan, transformer)
        stored = store.result_bytes(session_id, state["current"])
        return {
            "match": replayed == stored,
            "png_b64": base64.b64encode(replayed).decode(),
        }

    @app.get("/v1/health")
    def health():
        return {
            "ok": True,
            "models_loaded": vqgan is not None and transformer is not None,
        }

    frontend_dir = os.environ.get("UNICOLOR_FRONTEND_DIR")
    if frontend_dir and Path(frontend_dir, "index.html").exists():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=frontend_dir, html=True), name="ui")

    return app


def main() -> None:
    """Entry point used by `unicolor serve`."""
    import uvicorn

    app = create_app(config=ServiceConfig.from_env(os.environ.get("UNICOLOR_DATA_DIR")))
    uvicorn.run(app, host="127.0.0.1", port=int(os.environ.get("UNICOLOR_PORT", "8411")))
