// Stroke capture and serialization.
//
// The serialized form must match the CLI's strokes file byte-for-byte for
// the same geometry: a JSON array of {points, rgb, width} rendered exactly
// as Python's `json.dumps(..., indent=2)` does, including "1.0"-style
// rendering for whole-number color floats.

import type { Rgb, Stroke } from "./types";

export interface StrokeBuffer {
  strokes: Stroke[];
  active: Stroke | null;
}

export function emptyBuffer(): StrokeBuffer {
  return { strokes: [], active: null };
}

export function beginStroke(
  buffer: StrokeBuffer,
  x: number,
  y: number,
  rgb: Rgb,
  width: number,
): StrokeBuffer {
  return {
    strokes: buffer.strokes,
    active: { points: [[Math.round(x), Math.round(y)]], rgb, width },
  };
}

export function extendStroke(buffer: StrokeBuffer, x: number, y: number): StrokeBuffer {
  if (!buffer.active) return buffer;
  const px = Math.round(x);
  const py = Math.round(y);
  const pts = buffer.active.points;
  const last = pts[pts.length - 1];
  if (last[0] === px && last[1] === py) return buffer;
  return {
    strokes: buffer.strokes,
    active: { ...buffer.active, points: [...pts, [px, py]] },
  };
}

export function endStroke(buffer: StrokeBuffer): StrokeBuffer {
  if (!buffer.active) return buffer;
  return { strokes: [...buffer.strokes, buffer.active], active: null };
}

export function undoStroke(buffer: StrokeBuffer): StrokeBuffer {
  return { strokes: buffer.strokes.slice(0, -1), active: buffer.active };
}

/** Float rendering that matches Python's repr: whole floats keep ".0". */
export function pyFloat(value: number): string {
  if (Number.isInteger(value)) return `${value}.0`;
  return String(value);
}

/** JSON byte-identical to Python's json.dumps([s.to_dict() for s], indent=2). */
export function serializeStrokes(strokes: Stroke[]): string {
  if (strokes.length === 0) return "[]";
  const pad = (n: number) => " ".repeat(n);
  const parts = strokes.map((stroke) => {
    const pts = stroke.points
      .map((p) => `${pad(6)}[\n${pad(8)}${p[0]},\n${pad(8)}${p[1]}\n${pad(6)}]`)
      .join(",\n");
    const rgb = stroke.rgb.map((v) => `${pad(6)}${pyFloat(v)}`).join(",\n");
    return (
      `${pad(2)}{\n` +
      `${pad(4)}"points": [\n${pts}\n${pad(4)}],\n` +
      `${pad(4)}"rgb": [\n${rgb}\n${pad(4)}],\n` +
      `${pad(4)}"width": ${stroke.width}\n` +
      `${pad(2)}}`
    );
  });
  return `[\n${parts.join(",\n")}\n]`;
}

export function hexToRgb(hex: string): Rgb {
  const v = hex.replace("#", "");
  const round = (x: number) => Math.round(x * 1e6) / 1e6;
  return [
    round(parseInt(v.slice(0, 2), 16) / 255),
    round(parseInt(v.slice(2, 4), 16) / 255),
    round(parseInt(v.slice(4, 6), 16) / 255),
  ];
}
