import { describe, expect, it } from "vitest";

import type { CompareResponse, RankEntry, ScoreCell } from "../src/api.js";
import { displayScore, fullPrecision } from "../src/format.js";
import {
  renderError,
  renderGrid,
  renderIngredientList,
  renderRankingRows,
  renderScoreCell,
  renderSuggestions,
} from "../src/render.js";

const RANKING: RankEntry[] = [
  { ingredient: "staple_00", partner: "duo_01_b",
    predicted_score: 0.5684732330365456, status: "known",
    true_score: -0.041567, cooccurrence: 29 },
  { ingredient: "staple_00", partner: "ing_01_02",
    predicted_score: 0.3284149871204023, status: "known",
    true_score: -0.124299, cooccurrence: 34 },
  { ingredient: "staple_00", partner: "ing_07_05",
    predicted_score: 0.1031, status: "unknown",
    true_score: null, cooccurrence: null },
];

function attrValues(html: string, attr: string): string[] {
  return [...html.matchAll(new RegExp(`${attr}="([^"]*)"`, "g"))]
    .map((m) => m[1]);
}

describe("renderRankingRows", () => {
  const html = renderRankingRows(RANKING);

  it("mirrors the payload order and partner names exactly", () => {
    expect(attrValues(html, "data-partner"))
      .toEqual(RANKING.map((e) => e.partner));
  });

  it("carries every predicted score at full serialized precision", () => {
    const shown = attrValues(html, "data-score");
    const wantPredicted = RANKING.map((e) => fullPrecision(e.predicted_score));
    // data-score covers predicted plus the known rows' true scores
    expect(shown.filter((s) => wantPredicted.includes(s)))
      .toEqual(wantPredicted);
  });

  it("shows 4-decimal text with the full value in the tooltip", () => {
    for (const e of RANKING) {
      expect(html).toContain(
        `title="${fullPrecision(e.predicted_score)}" ` +
        `data-score="${fullPrecision(e.predicted_score)}">` +
        `${displayScore(e.predicted_score)}</span>`);
    }
  });

  it("numbers rows 1..n in payload order", () => {
    expect(html).toContain("<td>1</td>");
    expect(html).toContain("<td>2</td>");
    expect(html).toContain("<td>3</td>");
  });

  it("badges known rows with a dagger and unknown with a star", () => {
    const badges = [...html.matchAll(/class="badge" title="(\w+)">([^<]*)</g)]
      .map((m) => [m[1], m[2]]);
    expect(badges).toEqual([["known", "†"], ["known", "†"],
                            ["unknown", "*"]]);
  });

  it("leaves true score and co-occurrence blank for unknown pairs", () => {
    const rows = html.split("</tr>").filter((r) => r.includes("rankrow"));
    expect(rows[2]).toContain(`data-partner="ing_07_05"`);
    expect(rows[2]).not.toContain("-0.0416"); // no truth rendered
    expect(rows[2]).toMatch(/<td><\/td><td><\/td>$/);
  });
});

const CELL: ScoreCell = {
  a: "vanilla", b: "cocoa", predicted_score: 0.3597486,
  status: "known", true_score: 0.359749, cooccurrence: 2759,
};

describe("renderScoreCell", () => {
  it("shows the payload score rounded with full-precision tooltip", () => {
    const html = renderScoreCell(CELL);
    expect(html).toContain(displayScore(CELL.predicted_score));
    expect(html).toContain(`data-score="${fullPrecision(CELL.predicted_score)}"`);
    expect(html).toContain(`data-a="vanilla"`);
    expect(html).toContain(`data-b="cocoa"`);
  });
});

describe("renderGrid", () => {
  const resp: CompareResponse = {
    targets: ["vanilla", "onion"],
    probes: ["cocoa", "garlic"],
    grid: [
      [CELL,
       { a: "vanilla", b: "garlic", predicted_score: -0.477371,
         status: "known", true_score: -0.477371, cooccurrence: 9 }],
      [{ a: "onion", b: "cocoa", predicted_score: -0.21, status: "unknown",
         true_score: null, cooccurrence: null },
       { a: "onion", b: "garlic", predicted_score: 0.18, status: "unknown",
         true_score: null, cooccurrence: null }],
    ],
  };

  it("renders each cell through the same path as the score view", () => {
    const html = renderGrid(resp, null);
    for (const row of resp.grid) {
      for (const cell of row) {
        expect(html).toContain(renderScoreCell(cell));
      }
    }
  });

  it("lays the grid out row-major under target headers", () => {
    const html = renderGrid(resp, null);
    const order = attrValues(html, "data-a");
    expect(order).toEqual(["vanilla", "vanilla", "onion", "onion"]);
    expect(attrValues(html, "data-b"))
      .toEqual(["cocoa", "garlic", "cocoa", "garlic"]);
  });

  it("marks the complementary threshold in the legend when configured", () => {
    const html = renderGrid(resp, 0.592630127);
    expect(html).toContain(`data-threshold="0.592630127"`);
    expect(html).toContain(displayScore(0.592630127));
    expect(renderGrid(resp, null)).not.toContain("data-threshold");
  });
});

describe("renderIngredientList", () => {
  it("preserves server order and occurrence counts", () => {
    const html = renderIngredientList([
      { token: "salt", occurrence: 900 },
      { token: "butter", occurrence: 500 },
    ]);
    expect(attrValues(html, "data-token")).toEqual(["salt", "butter"]);
    expect(html).toContain("<small>900</small>");
  });

  it("escapes hostile tokens", () => {
    const html = renderIngredientList([
      { token: `<img src=x>`, occurrence: 1 },
    ]);
    expect(html).not.toContain("<img");
  });
});

describe("renderSuggestions and renderError", () => {
  it("turns suggestion tokens into chips in order", () => {
    const html = renderSuggestions(["staple_00", "staple_01"]);
    expect(attrValues(html, "data-token"))
      .toEqual(["staple_00", "staple_01"]);
  });

  it("renders an error banner with a retry control", () => {
    const html = renderError("service unreachable");
    expect(html).toContain("service unreachable");
    expect(html).toContain(`class="retry"`);
  });
});
