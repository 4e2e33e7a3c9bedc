// Wire types mirroring the /v1 API and the CLI file formats.

export type Rgb = [number, number, number];

export interface Stroke {
  points: [number, number][];
  rgb: Rgb;
  width: number;
}

export interface HintPoint {
  row: number;
  col: number;
  rgb: Rgb;
  source: "stroke" | "text" | "exemplar" | "manual";
}

export interface HintSetDoc {
  grid: { cell_size: number; rows: number; cols: number };
  hints: HintPoint[];
}

export interface ConditionsPayload {
  strokes: Stroke[];
  exemplar_png_b64?: string;
  text?: string;
}

export interface SamplerPayload {
  top_k: number;
  temperature: number;
  num_samples: number;
  seed: number;
}

export interface JobStatus {
  id: string;
  kind: string;
  state: "queued" | "running" | "done" | "failed";
  progress: { done: number; total: number };
  error: string | null;
  result: {
    images: string[];
    urls: string[];
    chain_seeds: number[];
    hints: HintSetDoc | null;
    session_id: string | null;
    kind: string;
  } | null;
}

export interface HistoryEntry {
  kind: "colorize" | "recolorize";
  hints: HintSetDoc | null;
  region_cells: [number, number][] | null;
  sampler: Record<string, unknown>;
  chosen_index: number;
  result: string;
}

export interface SessionDoc {
  id: string;
  base_is_gray: boolean;
  history: HistoryEntry[];
  current: string | null;
}

export type Cell = [number, number];
