// Per-source badges for the hint preview: every hint is labeled with the
// modality that produced it, so priority conflicts are visible instead of
// silent.

import type { HintSetDoc } from "./types";

export const SOURCE_COLORS: Record<string, string> = {
  stroke: "#2d6cdf",
  text: "#e08a1e",
  exemplar: "#2fa24c",
  manual: "#888888",
};

export interface Badge {
  row: number;
  col: number;
  source: string;
  cssColor: string;
  swatch: string; // the hint color itself as css rgb()
}

export function badgesFromHints(doc: HintSetDoc): Badge[] {
  return doc.hints.map((h) => ({
    row: h.row,
    col: h.col,
    source: h.source,
    cssColor: SOURCE_COLORS[h.source] ?? SOURCE_COLORS.manual,
    swatch: `rgb(${h.rgb.map((v) => Math.round(v * 255)).join(", ")})`,
  }));
}

export function sourcesPresent(badges: Badge[]): Set<string> {
  return new Set(badges.map((b) => b.source));
}

/** Legend entries for the sources that actually occur, in priority order. */
export function legend(badges: Badge[]): { source: string; cssColor: string }[] {
  const present = sourcesPresent(badges);
  return ["stroke", "text", "exemplar", "manual"]
    .filter((s) => present.has(s))
    .map((source) => ({ source, cssColor: SOURCE_COLORS[source] }));
}

/** Minimal DOM-free rendering used by the app and directly testable. */
export function renderBadgeHtml(badges: Badge[], cellSize: number, scale: number): string {
  return badges
    .map((b) => {
      const left = b.col * cellSize * scale;
      const top = b.row * cellSize * scale;
      const size = cellSize * scale;
      return (
        `<div class="badge badge-${b.source}" ` +
        `style="left:${left}px;top:${top}px;width:${size}px;height:${size}px;` +
        `background:${b.swatch};border-color:${b.cssColor}" ` +
        `title="${b.source} (${b.row}, ${b.col})"></div>`
      );
    })
    .join("");
}
