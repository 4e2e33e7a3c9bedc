// Region selection snapped to the cell grid, and the client-side check that
// a recolorized result differs from its base only inside the selection.

import type { Cell } from "./types";

export interface GridShape {
  cellSize: number;
  rows: number;
  cols: number;
}

/** Cells covered by a pixel-space drag rectangle (any corner order). */
export function rectToCells(
  grid: GridShape,
  x0: number,
  y0: number,
  x1: number,
  y1: number,
): Cell[] {
  const clamp = (v: number, hi: number) => Math.max(0, Math.min(hi, v));
  const left = clamp(Math.min(x0, x1), grid.cols * grid.cellSize - 1);
  const right = clamp(Math.max(x0, x1), grid.cols * grid.cellSize - 1);
  const top = clamp(Math.min(y0, y1), grid.rows * grid.cellSize - 1);
  const bottom = clamp(Math.max(y0, y1), grid.rows * grid.cellSize - 1);
  const c0 = Math.floor(left / grid.cellSize);
  const c1 = Math.floor(right / grid.cellSize);
  const r0 = Math.floor(top / grid.cellSize);
  const r1 = Math.floor(bottom / grid.cellSize);
  const cells: Cell[] = [];
  for (let r = r0; r <= r1; r++) {
    for (let c = c0; c <= c1; c++) {
      cells.push([r, c]);
    }
  }
  return cells;
}

export function toggleCell(cells: Cell[], cell: Cell): Cell[] {
  const idx = cells.findIndex(([r, c]) => r === cell[0] && c === cell[1]);
  if (idx >= 0) return cells.filter((_, i) => i !== idx);
  return [...cells, cell];
}

function cellSet(cells: Cell[]): Set<string> {
  return new Set(cells.map(([r, c]) => `${r},${c}`));
}

/**
 * True when two same-size RGBA buffers differ only at pixels inside the
 * selected cells. This is the client-side verification of the service's
 * locality guarantee for recolorization.
 */
export function differsOnlyInsideRegion(
  base: Uint8ClampedArray,
  edited: Uint8ClampedArray,
  width: number,
  height: number,
  cells: Cell[],
  cellSize: number,
): boolean {
  if (base.length !== edited.length || base.length !== width * height * 4) {
    throw new Error("buffer shapes do not match the image dimensions");
  }
  const selected = cellSet(cells);
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      const offset = (y * width + x) * 4;
      let changed = false;
      for (let ch = 0; ch < 4; ch++) {
        if (base[offset + ch] !== edited[offset + ch]) {
          changed = true;
          break;
        }
      }
      if (!changed) continue;
      const key = `${Math.floor(y / cellSize)},${Math.floor(x / cellSize)}`;
      if (!selected.has(key)) return false;
    }
  }
  return true;
}

/** Pixels changed outside the selection, for diagnostics. */
export function changedCellsOutsideRegion(
  base: Uint8ClampedArray,
  edited: Uint8ClampedArray,
  width: number,
  height: number,
  cells: Cell[],
  cellSize: number,
): Cell[] {
  const selected = cellSet(cells);
  const offenders = new Set<string>();
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      const offset = (y * width + x) * 4;
      for (let ch = 0; ch < 4; ch++) {
        if (base[offset + ch] !== edited[offset + ch]) {
          const key = `${Math.floor(y / cellSize)},${Math.floor(x / cellSize)}`;
          if (!selected.has(key)) offenders.add(key);
          break;
        }
      }
    }
  }
  return [...offenders].map((key) => {
    const [r, c] = key.split(",").map(Number);
    return [r, c] as Cell;
  });
}
