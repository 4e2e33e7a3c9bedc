// Single-page editor: wires the canvas, condition inputs, gallery and
// region tools to the /v1 API. Every displayed hint or result is a
// byte-faithful render of a service response; the client computes nothing
// itself beyond overlays and diffs.

import {
  ApiError,
  createSession,
  getSession,
  pollJob,
  previewHints,
  selectResult,
  submitColorize,
  submitRecolorize,
} from "./api";
import { badgesFromHints, legend, renderBadgeHtml } from "./badges";
import { differsOnlyInsideRegion, rectToCells, toggleCell } from "./region";
import {
  beginStroke,
  endStroke,
  extendStroke,
  hexToRgb,
  serializeStrokes,
  undoStroke,
} from "./strokes";
import {
  activeConditions,
  hasAnyCondition,
  initialState,
  reduce,
  type Action,
  type EditorState,
} from "./state";
import type { Cell, SamplerPayload } from "./types";

const SCALE = 6; // canvas pixels per image pixel

let state: EditorState = initialState();
let imageB64: string | null = null;
let cellSize = 8;
let gridRows = 8;
let gridCols = 8;

function dispatch(action: Action): void {
  state = reduce(state, action);
  render();
}

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

function sampler(): SamplerPayload {
  return {
    top_k: 100,
    temperature: 1.0,
    num_samples: Number(($("num-samples") as HTMLInputElement).value) || 4,
    seed: Number(($("seed") as HTMLInputElement).value) || 0,
  };
}

async function loadImage(file: File): Promise<void> {
  const bytes = new Uint8Array(await file.arrayBuffer());
  let binary = "";
  bytes.forEach((b) => (binary += String.fromCharCode(b)));
  imageB64 = btoa(binary);
  const session = await createSession(imageB64);
  const baseUrl = `/v1/sessions/${session.id}/images/base.png`;
  dispatch({ type: "session_created", sessionId: session.id, baseUrl });
  const img = new Image();
  img.onload = () => {
    gridCols = Math.floor(img.width / cellSize);
    gridRows = Math.floor(img.height / cellSize);
    drawCanvas(img);
  };
  img.src = baseUrl;
}

function drawCanvas(image: CanvasImageSource): void {
  const canvas = $("canvas") as HTMLCanvasElement;
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  ctx.imageSmoothingEnabled = false;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.drawImage(image, 0, 0, canvas.width, canvas.height);
  // stroke buffer overlay
  for (const stroke of state.strokeBuffer.strokes) {
    ctx.strokeStyle = `rgb(${stroke.rgb.map((v) => Math.round(v * 255)).join(",")})`;
    ctx.lineWidth = stroke.width * SCALE;
    ctx.lineCap = "round";
    ctx.beginPath();
    stroke.points.forEach(([x, y], i) => {
      if (i === 0) ctx.moveTo(x * SCALE, y * SCALE);
      else ctx.lineTo(x * SCALE, y * SCALE);
    });
    ctx.stroke();
  }
  // region selection overlay
  ctx.strokeStyle = "#ff3df1";
  ctx.lineWidth = 2;
  for (const [row, col] of state.regionCells) {
    ctx.strokeRect(col * cellSize * SCALE, row * cellSize * SCALE, cellSize * SCALE, cellSize * SCALE);
  }
}

async function refreshPreview(): Promise<void> {
  if (!imageB64) return;
  const conditions = activeConditions(state);
  if (!hasAnyCondition(conditions)) {
    dispatch({ type: "preview_ready", hints: { grid: { cell_size: cellSize, rows: gridRows, cols: gridCols }, hints: [] } });
    return;
  }
  try {
    const doc = await previewHints(imageB64, conditions);
    dispatch({ type: "preview_ready", hints: doc.hints });
  } catch (err) {
    dispatch({ type: "error", message: err instanceof ApiError ? err.message : String(err) });
  }
}

async function generate(): Promise<void> {
  if (!imageB64 || !state.sessionId || state.jobInFlight) return;
  const conditions = activeConditions(state);
  try {
    const { job_id } = await submitColorize(
      imageB64,
      hasAnyCondition(conditions) ? conditions : null,
      sampler(),
      state.sessionId,
    );
    dispatch({ type: "job_started", jobId: job_id });
    const status = await pollJob(job_id, { onProgress: showProgress });
    const items = (status.result?.urls ?? []).map((url, index) => ({
      url,
      jobId: job_id,
      index,
    }));
    dispatch({ type: "gallery_ready", items });
  } catch (err) {
    dispatch({ type: "job_failed", message: err instanceof ApiError ? err.message : String(err) });
  }
}

async function recolorizeSelection(): Promise<void> {
  if (!state.sessionId || state.regionCells.length === 0 || state.jobInFlight) return;
  const conditions = activeConditions(state);
  try {
    const { job_id } = await submitRecolorize(
      state.sessionId,
      state.regionCells,
      hasAnyCondition(conditions) ? conditions : null,
      sampler(),
    );
    dispatch({ type: "job_started", jobId: job_id });
    const status = await pollJob(job_id, { onProgress: showProgress });
    const items = (status.result?.urls ?? []).map((url, index) => ({
      url,
      jobId: job_id,
      index,
    }));
    dispatch({ type: "gallery_ready", items });
    await verifyLocality(items[0]?.url);
  } catch (err) {
    dispatch({ type: "job_failed", message: err instanceof ApiError ? err.message : String(err) });
  }
}

/** Client-side check of the service's locality guarantee. */
async function verifyLocality(firstResultUrl?: string): Promise<void> {
  if (!firstResultUrl || !state.baseUrl) return;
  const [base, edited] = await Promise.all([
    imageDataFromUrl(state.baseUrl),
    imageDataFromUrl(firstResultUrl),
  ]);
  if (!base || !edited || base.width !== edited.width) return;
  const ok = differsOnlyInsideRegion(
    base.data,
    edited.data,
    base.width,
    base.height,
    state.regionCells as Cell[],
    cellSize,
  );
  if (!ok) {
    dispatch({ type: "error", message: "locality check failed: pixels changed outside the selection" });
  }
}

async function imageDataFromUrl(url: string): Promise<ImageData | null> {
  return new Promise((resolve) => {
    const img = new Image();
    img.crossOrigin = "anonymous";
    img.onload = () => {
      const off = document.createElement("canvas");
      off.width = img.width;
      off.height = img.height;
      const ctx = off.getContext("2d");
      if (!ctx) return resolve(null);
      ctx.drawImage(img, 0, 0);
      resolve(ctx.getImageData(0, 0, img.width, img.height));
    };
    img.onerror = () => resolve(null);
    img.src = url;
  });
}

async function pickResult(index: number): Promise<void> {
  const item = state.gallery[index];
  if (!item || !state.sessionId) return;
  await selectResult(state.sessionId, item.jobId, item.index);
  const session = await getSession(state.sessionId);
  const current = session.current
    ? `/v1/sessions/${state.sessionId}/images/${session.current}`
    : state.baseUrl;
  dispatch({
    type: "pick_result",
    index,
    historyLabel: `step ${session.history.length}`,
    imageUrl: current ?? "",
  });
  if (current) {
    const img = new Image();
    img.onload = () => drawCanvas(img);
    img.src = current;
    state = { ...state, baseUrl: current };
  }
}

function showProgress(done: number, total: number): void {
  $("progress").textContent = total ? `${done}/${total} cells` : "";
}

function render(): void {
  $("status").textContent = state.jobInFlight
    ? "working..."
    : (state.error ?? "ready");
  $("strokes-json").textContent = serializeStrokes(state.strokeBuffer.strokes);

  const badgeLayer = $("badges");
  if (state.preview) {
    const badges = badgesFromHints(state.preview);
    badgeLayer.innerHTML = renderBadgeHtml(badges, cellSize, SCALE);
    $("legend").innerHTML = legend(badges)
      .map((l) => `<span class="chip" style="border-color:${l.cssColor}">${l.source}</span>`)
      .join(" ");
  } else {
    badgeLayer.innerHTML = "";
  }

  const gallery = $("gallery");
  gallery.innerHTML = state.gallery
    .map(
      (item, i) =>
        `<img src="${item.url}" data-index="${i}" class="thumb${
          state.selected === i ? " picked" : ""
        }" alt="sample ${i}">`,
    )
    .join("");
  gallery.querySelectorAll("img").forEach((el) => {
    el.addEventListener("click", () => void pickResult(Number(el.dataset.index)));
  });

  $("history").innerHTML = state.history
    .map((h, i) => `<button data-history="${i}">${h.label}</button>`)
    .join(" ");
  $("history")
    .querySelectorAll("button")
    .forEach((el) => {
      el.addEventListener("click", () => {
        dispatch({ type: "restore_history", index: Number(el.dataset.history) });
        const img = new Image();
        img.onload = () => drawCanvas(img);
        if (state.baseUrl) img.src = state.baseUrl;
      });
    });
}

export function boot(): void {
  const canvas = $("canvas") as HTMLCanvasElement;
  let drawing = false;
  let regionDrag: [number, number] | null = null;

  const canvasPos = (ev: MouseEvent): [number, number] => {
    const rect = canvas.getBoundingClientRect();
    return [(ev.clientX - rect.left) / SCALE, (ev.clientY - rect.top) / SCALE];
  };

  canvas.addEventListener("mousedown", (ev) => {
    const [x, y] = canvasPos(ev);
    if (($("tool") as HTMLSelectElement).value === "stroke") {
      if (!state.modalities.stroke) return; // unchecked: drawing disabled
      drawing = true;
      const rgb = hexToRgb(($("color") as HTMLInputElement).value);
      const width = Number(($("width") as HTMLInputElement).value) || 2;
      dispatch({ type: "set_strokes", buffer: beginStroke(state.strokeBuffer, x, y, rgb, width) });
    } else {
      regionDrag = [x, y];
    }
  });
  canvas.addEventListener("mousemove", (ev) => {
    if (!drawing) return;
    const [x, y] = canvasPos(ev);
    dispatch({ type: "set_strokes", buffer: extendStroke(state.strokeBuffer, x, y) });
  });
  window.addEventListener("mouseup", (ev) => {
    if (drawing) {
      drawing = false;
      dispatch({ type: "set_strokes", buffer: endStroke(state.strokeBuffer) });
      void refreshPreview();
    } else if (regionDrag) {
      const [x, y] = canvasPos(ev as MouseEvent);
      const grid = { cellSize, rows: gridRows, cols: gridCols };
      const cells = rectToCells(grid, regionDrag[0], regionDrag[1], x, y);
      const next =
        cells.length === 1 ? toggleCell(state.regionCells, cells[0]) : cells;
      dispatch({ type: "set_region", cells: next });
      regionDrag = null;
    }
  });

  $("file").addEventListener("change", (ev) => {
    const input = ev.target as HTMLInputElement;
    if (input.files?.[0]) void loadImage(input.files[0]);
  });
  $("undo").addEventListener("click", () => {
    dispatch({ type: "set_strokes", buffer: undoStroke(state.strokeBuffer) });
    void refreshPreview();
  });
  $("generate").addEventListener("click", () => void generate());
  $("recolorize").addEventListener("click", () => void recolorizeSelection());
  $("preview").addEventListener("click", () => void refreshPreview());
  (["stroke", "exemplar", "text"] as const).forEach((modality) => {
    $(`mod-${modality}`).addEventListener("change", () => {
      dispatch({ type: "toggle_modality", modality });
      void refreshPreview();
    });
  });
  $("text-prompt").addEventListener("change", (ev) => {
    dispatch({ type: "set_text", prompt: (ev.target as HTMLInputElement).value });
    void refreshPreview();
  });
  $("exemplar-file").addEventListener("change", async (ev) => {
    const input = ev.target as HTMLInputElement;
    const file = input.files?.[0];
    if (!file) return;
    const bytes = new Uint8Array(await file.arrayBuffer());
    let binary = "";
    bytes.forEach((b) => (binary += String.fromCharCode(b)));
    dispatch({ type: "set_exemplar", b64: btoa(binary) });
    void refreshPreview();
  });
  render();
}

if (typeof document !== "undefined" && document.getElementById("canvas")) {
  boot();
}
