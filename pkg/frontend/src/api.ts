// Typed client for the /v1 API. All generation is asynchronous: submit,
// then poll the job until done/failed.

import type {
  Cell,
  ConditionsPayload,
  HintSetDoc,
  JobStatus,
  SamplerPayload,
  SessionDoc,
} from "./types";

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
  ) {
    super(message);
  }
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  const response = await fetch(path, {
    headers: { "Content-Type": "application/json" },
    ...init,
  });
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const doc = await response.json();
      if (doc.detail) detail = String(doc.detail);
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(response.status, detail);
  }
  return response.json() as Promise<T>;
}

export function previewHints(
  imageB64: string,
  conditions: ConditionsPayload,
): Promise<{ hints: HintSetDoc; overlay_png_b64: string }> {
  return request("/v1/hints/preview", {
    method: "POST",
    body: JSON.stringify({ image_png_b64: imageB64, conditions }),
  });
}

export function createSession(imageB64: string): Promise<SessionDoc> {
  return request("/v1/sessions", {
    method: "POST",
    body: JSON.stringify({ image_png_b64: imageB64 }),
  });
}

export function getSession(sessionId: string): Promise<SessionDoc> {
  return request(`/v1/sessions/${sessionId}`);
}

export function submitColorize(
  imageB64: string,
  conditions: ConditionsPayload | null,
  sampler: SamplerPayload,
  sessionId: string | null,
): Promise<{ job_id: string }> {
  return request("/v1/colorize", {
    method: "POST",
    body: JSON.stringify({
      image_png_b64: imageB64,
      conditions,
      sampler,
      session_id: sessionId,
    }),
  });
}

export function submitRecolorize(
  sessionId: string,
  regionCells: Cell[],
  conditions: ConditionsPayload | null,
  sampler: SamplerPayload,
): Promise<{ job_id: string }> {
  return request(`/v1/sessions/${sessionId}/recolorize`, {
    method: "POST",
    body: JSON.stringify({ region_cells: regionCells, conditions, sampler }),
  });
}

export function getJob(jobId: string): Promise<JobStatus> {
  return request(`/v1/jobs/${jobId}`);
}

export function selectResult(sessionId: string, jobId: string, index: number): Promise<unknown> {
  return request(`/v1/sessions/${sessionId}/select`, {
    method: "POST",
    body: JSON.stringify({ job_id: jobId, index }),
  });
}

export interface PollOptions {
  intervalMs?: number;
  timeoutMs?: number;
  onProgress?: (done: number, total: number) => void;
  sleep?: (ms: number) => Promise<void>;
}

const defaultSleep = (ms: number) => new Promise<void>((resolve) => setTimeout(resolve, ms));

/** Poll until the job leaves the queue; rejects on failure or timeout. */
export async function pollJob(jobId: string, options: PollOptions = {}): Promise<JobStatus> {
  const interval = options.intervalMs ?? 250;
  const timeout = options.timeoutMs ?? 120_000;
  const sleep = options.sleep ?? defaultSleep;
  const started = Date.now();
  for (;;) {
    const status = await getJob(jobId);
    options.onProgress?.(status.progress.done, status.progress.total);
    if (status.state === "done") return status;
    if (status.state === "failed") {
      throw new ApiError(500, status.error ?? "job failed");
    }
    if (Date.now() - started > timeout) {
      throw new ApiError(408, "timed out waiting for the job");
    }
    await sleep(interval);
  }
}
