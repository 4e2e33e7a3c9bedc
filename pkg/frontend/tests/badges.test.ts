import { describe, expect, it } from "vitest";

import { badgesFromHints, legend, renderBadgeHtml, sourcesPresent } from "../src/badges";
import type { HintSetDoc } from "../src/types";

const HYBRID: HintSetDoc = {
  grid: { cell_size: 8, rows: 8, cols: 8 },
  hints: [
    { row: 0, col: 0, rgb: [1, 0, 0], source: "stroke" },
    { row: 1, col: 4, rgb: [0, 1, 0], source: "exemplar" },
    { row: 3, col: 3, rgb: [0, 0, 1], source: "text" },
    { row: 5, col: 6, rgb: [0.5, 0.5, 0.5], source: "exemplar" },
  ],
};

describe("hint badges", () => {
  it("shows per-source badges for all three modalities simultaneously", () => {
    const badges = badgesFromHints(HYBRID);
    expect(badges).toHaveLength(4);
    expect(sourcesPresent(badges)).toEqual(new Set(["stroke", "text", "exemplar"]));
    const html = renderBadgeHtml(badges, 8, 6);
    expect(html).toContain("badge-stroke");
    expect(html).toContain("badge-text");
    expect(html).toContain("badge-exemplar");
  });

  it("positions badges at cell granularity", () => {
    const [first] = badgesFromHints(HYBRID);
    const html = renderBadgeHtml([first], 8, 6);
    expect(html).toContain("left:0px");
    expect(html).toContain("top:0px");
    expect(html).toContain("width:48px");
    const second = badgesFromHints(HYBRID)[1]; // row 1, col 4
    const html2 = renderBadgeHtml([second], 8, 6);
    expect(html2).toContain("left:192px");
    expect(html2).toContain("top:48px");
  });

  it("swatch carries the hint color, border the source color", () => {
    const [first] = badgesFromHints(HYBRID);
    expect(first.swatch).toBe("rgb(255, 0, 0)");
    expect(first.cssColor).not.toBe(first.swatch);
  });

  it("legend lists present sources in priority order", () => {
    const entries = legend(badgesFromHints(HYBRID));
    expect(entries.map((e) => e.source)).toEqual(["stroke", "text", "exemplar"]);
  });
});
