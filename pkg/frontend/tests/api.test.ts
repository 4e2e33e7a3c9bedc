import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiError, pollJob, previewHints, submitColorize } from "../src/api";
import type { JobStatus } from "../src/types";

function jsonResponse(doc: unknown, status = 200): Response {
  return new Response(JSON.stringify(doc), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("api client", () => {
  it("posts conditions to the preview endpoint", async () => {
    const fetchMock = vi.fn(async (url: RequestInfo | URL, init?: RequestInit) => {
      expect(String(url)).toBe("/v1/hints/preview");
      const body = JSON.parse(String(init?.body));
      expect(body.conditions.text).toBe("a red car");
      return jsonResponse({ hints: { grid: {}, hints: [] }, overlay_png_b64: "" });
    });
    vi.stubGlobal("fetch", fetchMock);
    await previewHints("IMG", { strokes: [], text: "a red car" });
    expect(fetchMock).toHaveBeenCalledOnce();
  });

  it("surfaces the service's error detail", async () => {
    vi.stubGlobal("fetch", vi.fn(async () => jsonResponse({ detail: "no conditions given" }, 400)));
    await expect(submitColorize("IMG", null, { top_k: 100, temperature: 1, num_samples: 1, seed: 0 }, null))
      .rejects.toMatchObject({ status: 400, message: "no conditions given" });
  });

  it("polls a job to completion and reports progress", async () => {
    const states: JobStatus[] = [
      { id: "j", kind: "colorize", state: "queued", progress: { done: 0, total: 64 }, error: null, result: null },
      { id: "j", kind: "colorize", state: "running", progress: { done: 32, total: 64 }, error: null, result: null },
      {
        id: "j", kind: "colorize", state: "done", progress: { done: 64, total: 64 }, error: null,
        result: { images: ["result_00.png"], urls: ["/v1/jobs/j/results/0.png"], chain_seeds: [1], hints: null, session_id: null, kind: "colorize" },
      },
    ];
    let call = 0;
    vi.stubGlobal("fetch", vi.fn(async () => jsonResponse(states[Math.min(call++, 2)])));
    const seen: number[] = [];
    const status = await pollJob("j", {
      intervalMs: 1,
      sleep: async () => {},
      onProgress: (done) => seen.push(done),
    });
    expect(status.state).toBe("done");
    expect(status.result?.urls).toHaveLength(1);
    expect(seen).toEqual([0, 32, 64]);
  });

  it("rejects when the job fails", async () => {
    const failed: JobStatus = {
      id: "j", kind: "colorize", state: "failed",
      progress: { done: 0, total: 0 }, error: "ValueError: boom", result: null,
    };
    vi.stubGlobal("fetch", vi.fn(async () => jsonResponse(failed)));
    await expect(pollJob("j", { sleep: async () => {} })).rejects.toBeInstanceOf(ApiError);
  });

  it("times out", async () => {
    const queued: JobStatus = {
      id: "j", kind: "colorize", state: "queued",
      progress: { done: 0, total: 0 }, error: null, result: null,
    };
    vi.stubGlobal("fetch", vi.fn(async () => jsonResponse(queued)));
    await expect(
      pollJob("j", { timeoutMs: 0, sleep: async () => {} }),
    ).rejects.toMatchObject({ status: 408 });
  });
});
