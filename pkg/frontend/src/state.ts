// Editor state and its transition rules.
//
// All mutations go through `reduce` so the invariants hold everywhere:
// history is append-only, the selected result index stays valid, at most
// one generation job is in flight, and a modality contributes conditions
// only while its checkbox is on.

import { emptyBuffer, type StrokeBuffer } from "./strokes";
import type { Cell, ConditionsPayload, HintSetDoc } from "./types";

export interface GalleryItem {
  url: string;
  jobId: string;
  index: number;
}

export interface EditorState {
  sessionId: string | null;
  baseUrl: string | null;
  modalities: { stroke: boolean; exemplar: boolean; text: boolean };
  strokeBuffer: StrokeBuffer;
  exemplarB64: string | null;
  textPrompt: string;
  preview: HintSetDoc | null;
  gallery: GalleryItem[];
  selected: number | null;
  regionCells: Cell[];
  history: { label: string; imageUrl: string }[];
  jobInFlight: string | null;
  error: string | null;
}

export function initialState(): EditorState {
  return {
    sessionId: null,
    baseUrl: null,
    modalities: { stroke: true, exemplar: false, text: false },
    strokeBuffer: emptyBuffer(),
    exemplarB64: null,
    textPrompt: "",
    preview: null,
    gallery: [],
    selected: null,
    regionCells: [],
    history: [],
    jobInFlight: null,
    error: null,
  };
}

export type Action =
  | { type: "session_created"; sessionId: string; baseUrl: string }
  | { type: "toggle_modality"; modality: keyof EditorState["modalities"] }
  | { type: "set_strokes"; buffer: StrokeBuffer }
  | { type: "set_exemplar"; b64: string | null }
  | { type: "set_text"; prompt: string }
  | { type: "preview_ready"; hints: HintSetDoc }
  | { type: "job_started"; jobId: string }
  | { type: "job_failed"; message: string }
  | { type: "gallery_ready"; items: GalleryItem[] }
  | { type: "pick_result"; index: number; historyLabel: string; imageUrl: string }
  | { type: "set_region"; cells: Cell[] }
  | { type: "restore_history"; index: number }
  | { type: "error"; message: string | null };

export function reduce(state: EditorState, action: Action): EditorState {
  switch (action.type) {
    case "session_created":
      return { ...initialState(), sessionId: action.sessionId, baseUrl: action.baseUrl };
    case "toggle_modality": {
      const modalities = {
        ...state.modalities,
        [action.modality]: !state.modalities[action.modality],
      };
      return { ...state, modalities };
    }
    case "set_strokes":
      if (!state.modalities.stroke) return state; // drawing disabled
      return { ...state, strokeBuffer: action.buffer, preview: null };
    case "set_exemplar":
      return { ...state, exemplarB64: action.b64, preview: null };
    case "set_text":
      return { ...state, textPrompt: action.prompt, preview: null };
    case "preview_ready":
      return { ...state, preview: action.hints };
    case "job_started":
      if (state.jobInFlight !== null) return state; // one job per session
      return { ...state, jobInFlight: action.jobId, error: null };
    case "job_failed":
      return { ...state, jobInFlight: null, error: action.message };
    case "gallery_ready":
      return { ...state, jobInFlight: null, gallery: action.items, selected: null };
    case "pick_result": {
      if (action.index < 0 || action.index >= state.gallery.length) return state;
      const history = [
        ...state.history,
        { label: action.historyLabel, imageUrl: action.imageUrl },
      ];
      return { ...state, selected: action.index, history, regionCells: [] };
    }
    case "set_region":
      return { ...state, regionCells: action.cells };
    case "restore_history": {
      if (action.index < 0 || action.index >= state.history.length) return state;
      return { ...state, baseUrl: state.history[action.index].imageUrl };
    }
    case "error":
      return { ...state, error: action.message };
  }
}

/** Conditions assembled from the checked modalities only. */
export function activeConditions(state: EditorState): ConditionsPayload {
  const conditions: ConditionsPayload = { strokes: [] };
  if (state.modalities.stroke) {
    conditions.strokes = state.strokeBuffer.strokes;
  }
  if (state.modalities.exemplar && state.exemplarB64) {
    conditions.exemplar_png_b64 = state.exemplarB64;
  }
  if (state.modalities.text && state.textPrompt.trim()) {
    conditions.text = state.textPrompt.trim();
  }
  return conditions;
}

export function hasAnyCondition(conditions: ConditionsPayload): boolean {
  return (
    conditions.strokes.length > 0 ||
    conditions.exemplar_png_b64 !== undefined ||
    conditions.text !== undefined
  );
}
