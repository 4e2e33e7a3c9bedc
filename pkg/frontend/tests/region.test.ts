import { describe, expect, it } from "vitest";

import {
  changedCellsOutsideRegion,
  differsOnlyInsideRegion,
  rectToCells,
  toggleCell,
} from "../src/region";
import type { Cell } from "../src/types";

const GRID = { cellSize: 8, rows: 8, cols: 8 };

describe("rectToCells", () => {
  it("snaps a drag rectangle to covered cells", () => {
    expect(rectToCells(GRID, 0, 0, 7, 7)).toEqual([[0, 0]]);
    expect(rectToCells(GRID, 0, 0, 8, 8)).toEqual([[0, 0], [0, 1], [1, 0], [1, 1]]);
  });

  it("handles any corner order", () => {
    expect(rectToCells(GRID, 20, 20, 5, 5)).toEqual(rectToCells(GRID, 5, 5, 20, 20));
  });

  it("clamps to the grid", () => {
    const cells = rectToCells(GRID, 60, 60, 500, 500);
    expect(cells).toEqual([[7, 7]]);
  });
});

describe("toggleCell", () => {
  it("adds then removes", () => {
    let cells: Cell[] = [];
    cells = toggleCell(cells, [2, 3]);
    expect(cells).toEqual([[2, 3]]);
    cells = toggleCell(cells, [2, 3]);
    expect(cells).toEqual([]);
  });
});

function rgba(width: number, height: number, fill: number): Uint8ClampedArray {
  const out = new Uint8ClampedArray(width * height * 4);
  out.fill(fill);
  return out;
}

describe("client locality diff", () => {
  const width = 32;
  const height = 32;
  const cellSize = 8;

  it("accepts edits confined to the selected cells", () => {
    const base = rgba(width, height, 100);
    const edited = base.slice();
    // paint cell (1, 2): rows 8..15, cols 16..23
    for (let y = 8; y < 16; y++) {
      for (let x = 16; x < 24; x++) {
        edited[(y * width + x) * 4] = 250;
      }
    }
    expect(
      differsOnlyInsideRegion(base, edited, width, height, [[1, 2]], cellSize),
    ).toBe(true);
  });

  it("rejects edits outside the selection and names the offending cell", () => {
    const base = rgba(width, height, 100);
    const edited = base.slice();
    edited[(0 * width + 0) * 4 + 1] = 7; // pixel in cell (0, 0)
    expect(
      differsOnlyInsideRegion(base, edited, width, height, [[1, 2]], cellSize),
    ).toBe(false);
    expect(
      changedCellsOutsideRegion(base, edited, width, height, [[1, 2]], cellSize),
    ).toEqual([[0, 0]]);
  });

  it("identical buffers pass for any selection", () => {
    const base = rgba(width, height, 55);
    expect(differsOnlyInsideRegion(base, base.slice(), width, height, [], cellSize)).toBe(true);
  });

  it("throws on shape mismatch", () => {
    const base = rgba(width, height, 0);
    expect(() =>
      differsOnlyInsideRegion(base, rgba(16, 16, 0), width, height, [], cellSize),
    ).toThrow();
  });
});
