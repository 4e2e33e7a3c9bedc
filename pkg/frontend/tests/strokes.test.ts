import { describe, expect, it } from "vitest";

import {
  beginStroke,
  emptyBuffer,
  endStroke,
  extendStroke,
  hexToRgb,
  pyFloat,
  serializeStrokes,
  undoStroke,
} from "../src/strokes";
import type { Stroke } from "../src/types";

// produced by the CLI's stroke writer for the same geometry:
// json.dumps([s.to_dict() for s in strokes], indent=2)
const CLI_FIXTURE = `[
  {
    "points": [
      [
        3,
        4
      ],
      [
        60,
        4
      ],
      [
        60,
        20
      ]
    ],
    "rgb": [
      0.95,
      0.28,
      0.05
    ],
    "width": 3
  },
  {
    "points": [
      [
        10,
        50
      ]
    ],
    "rgb": [
      0.4,
      0.38,
      0.95
    ],
    "width": 1
  }
]`;

describe("stroke serialization", () => {
  it("matches the CLI JSON byte-for-byte for the same geometry", () => {
    const strokes: Stroke[] = [
      { points: [[3, 4], [60, 4], [60, 20]], rgb: [0.95, 0.28, 0.05], width: 3 },
      { points: [[10, 50]], rgb: [0.4, 0.38, 0.95], width: 1 },
    ];
    expect(serializeStrokes(strokes)).toBe(CLI_FIXTURE);
  });

  it("renders whole-number floats the way Python does", () => {
    expect(pyFloat(1)).toBe("1.0");
    expect(pyFloat(0)).toBe("0.0");
    expect(pyFloat(0.28)).toBe("0.28");
    const pureRed: Stroke = { points: [[0, 0]], rgb: [1, 0, 0], width: 1 };
    const doc = serializeStrokes([pureRed]);
    expect(doc).toContain("1.0,");
    expect(doc).toContain("0.0,");
    expect(JSON.parse(doc)[0].rgb).toEqual([1, 0, 0]);
  });

  it("serializes the empty buffer as []", () => {
    expect(serializeStrokes([])).toBe("[]");
  });
});

describe("stroke buffer", () => {
  it("captures begin/extend/end as one stroke", () => {
    let buffer = emptyBuffer();
    buffer = beginStroke(buffer, 1.2, 2.7, [1, 0, 0], 2);
    buffer = extendStroke(buffer, 5, 5);
    buffer = extendStroke(buffer, 5.2, 5.1); // rounds to same pixel: dropped
    buffer = endStroke(buffer);
    expect(buffer.strokes).toHaveLength(1);
    expect(buffer.strokes[0].points).toEqual([[1, 3], [5, 5]]);
    expect(buffer.active).toBeNull();
  });

  it("undo removes the last stroke", () => {
    let buffer = emptyBuffer();
    buffer = endStroke(beginStroke(buffer, 0, 0, [1, 0, 0], 1));
    buffer = endStroke(beginStroke(buffer, 3, 3, [0, 1, 0], 1));
    expect(buffer.strokes).toHaveLength(2);
    buffer = undoStroke(buffer);
    expect(buffer.strokes).toHaveLength(1);
    expect(buffer.strokes[0].rgb).toEqual([1, 0, 0]);
  });

  it("extend without begin is a no-op", () => {
    const buffer = extendStroke(emptyBuffer(), 4, 4);
    expect(buffer.strokes).toHaveLength(0);
    expect(buffer.active).toBeNull();
  });
});

describe("hexToRgb", () => {
  it("converts with 1e-6 rounding", () => {
    expect(hexToRgb("#ff0000")).toEqual([1, 0, 0]);
    expect(hexToRgb("#000000")).toEqual([0, 0, 0]);
    const [r, g, b] = hexToRgb("#4080c0");
    expect(r).toBeCloseTo(64 / 255, 5);
    expect(g).toBeCloseTo(128 / 255, 5);
    expect(b).toBeCloseTo(192 / 255, 5);
  });
});
