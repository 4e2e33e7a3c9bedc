import { describe, expect, it } from "vitest";

import { beginStroke, emptyBuffer, endStroke } from "../src/strokes";
import {
  activeConditions,
  hasAnyCondition,
  initialState,
  reduce,
  type EditorState,
} from "../src/state";

function withSession(): EditorState {
  return reduce(initialState(), {
    type: "session_created",
    sessionId: "s1",
    baseUrl: "/v1/sessions/s1/images/base.png",
  });
}

describe("editor state", () => {
  it("drawing is disabled while the stroke modality is unchecked", () => {
    let state = withSession();
    state = reduce(state, { type: "toggle_modality", modality: "stroke" });
    expect(state.modalities.stroke).toBe(false);
    const buffer = endStroke(beginStroke(emptyBuffer(), 1, 1, [1, 0, 0], 1));
    const after = reduce(state, { type: "set_strokes", buffer });
    expect(after.strokeBuffer.strokes).toHaveLength(0);
  });

  it("at most one job in flight", () => {
    let state = withSession();
    state = reduce(state, { type: "job_started", jobId: "a" });
    const second = reduce(state, { type: "job_started", jobId: "b" });
    expect(second.jobInFlight).toBe("a");
  });

  it("history is append-only and selection stays valid", () => {
    let state = withSession();
    state = reduce(state, {
      type: "gallery_ready",
      items: [0, 1, 2, 3].map((i) => ({ url: `/r/${i}.png`, jobId: "j", index: i })),
    });
    state = reduce(state, {
      type: "pick_result", index: 2, historyLabel: "step 1", imageUrl: "/r/2.png",
    });
    expect(state.selected).toBe(2);
    expect(state.history).toHaveLength(1);
    // out-of-range pick is ignored
    const bad = reduce(state, {
      type: "pick_result", index: 9, historyLabel: "x", imageUrl: "y",
    });
    expect(bad.selected).toBe(2);
    expect(bad.history).toHaveLength(1);
    state = reduce(state, {
      type: "pick_result", index: 0, historyLabel: "step 2", imageUrl: "/r/0.png",
    });
    expect(state.history.map((h) => h.label)).toEqual(["step 1", "step 2"]);
  });

  it("network failure keeps state and surfaces the error", () => {
    let state = withSession();
    const buffer = endStroke(beginStroke(emptyBuffer(), 1, 1, [1, 0, 0], 2));
    state = reduce(state, { type: "set_strokes", buffer });
    state = reduce(state, { type: "job_started", jobId: "a" });
    state = reduce(state, { type: "job_failed", message: "connection refused" });
    expect(state.error).toBe("connection refused");
    expect(state.jobInFlight).toBeNull();
    expect(state.strokeBuffer.strokes).toHaveLength(1); // state preserved
  });

  it("history restore rebases the canvas", () => {
    let state = withSession();
    state = reduce(state, {
      type: "gallery_ready",
      items: [{ url: "/r/0.png", jobId: "j", index: 0 }],
    });
    state = reduce(state, {
      type: "pick_result", index: 0, historyLabel: "step 1", imageUrl: "/r/0.png",
    });
    state = reduce(state, { type: "restore_history", index: 0 });
    expect(state.baseUrl).toBe("/r/0.png");
  });
});

describe("condition assembly", () => {
  it("only checked modalities contribute", () => {
    let state = withSession();
    const buffer = endStroke(beginStroke(emptyBuffer(), 1, 1, [1, 0, 0], 2));
    state = reduce(state, { type: "set_strokes", buffer });
    state = reduce(state, { type: "set_text", prompt: "a red car" });
    state = reduce(state, { type: "set_exemplar", b64: "UE5H" });
    // text and exemplar are unchecked by default
    let conditions = activeConditions(state);
    expect(conditions.strokes).toHaveLength(1);
    expect(conditions.text).toBeUndefined();
    expect(conditions.exemplar_png_b64).toBeUndefined();

    state = reduce(state, { type: "toggle_modality", modality: "text" });
    state = reduce(state, { type: "toggle_modality", modality: "exemplar" });
    conditions = activeConditions(state);
    expect(conditions.text).toBe("a red car");
    expect(conditions.exemplar_png_b64).toBe("UE5H");

    state = reduce(state, { type: "toggle_modality", modality: "stroke" });
    conditions = activeConditions(state);
    expect(conditions.strokes).toHaveLength(0);
    expect(hasAnyCondition(conditions)).toBe(true);
  });

  it("hasAnyCondition is false when everything is off or empty", () => {
    const state = withSession();
    const conditions = activeConditions({ ...state, strokeBuffer: emptyBuffer() });
    expect(hasAnyCondition(conditions)).toBe(false);
  });
});
