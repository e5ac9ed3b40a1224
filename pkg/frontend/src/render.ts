/** Pure HTML renderers: payload in, markup out, no fetching and no
 * arithmetic on scores beyond display rounding. Each rendered number
 * carries its full-precision source in data-score and title attributes
 * so tests (and tooltips) can read back exactly what the API sent. */

import type {
  CompareResponse,
  IngredientEntry,
  RankEntry,
  ScoreCell,
} from "./api.js";
import {
  badge,
  displayScore,
  escapeHtml,
  fullPrecision,
  scoreColor,
} from "./format.js";

function scoreSpan(x: number): string {
  return `<span class="score" title="${fullPrecision(x)}" ` +
    `data-score="${fullPrecision(x)}">${displayScore(x)}</span>`;
}

export function renderIngredientList(entries: IngredientEntry[]): string {
  return entries.map((e) =>
    `<li class="token" data-token="${escapeHtml(e.token)}">` +
    `${escapeHtml(e.token)} <small>${e.occurrence}</small></li>`,
  ).join("");
}

export function renderRankingRows(entries: RankEntry[]): string {
  return entries.map((e, i) => {
    const truth = e.true_score === null ? "" : scoreSpan(e.true_score);
    return `<tr class="rankrow" data-partner="${escapeHtml(e.partner)}">` +
      `<td>${i + 1}</td>` +
      `<td class="token">${escapeHtml(e.partner)}</td>` +
      `<td>${scoreSpan(e.predicted_score)}</td>` +
      `<td class="badge" title="${e.status}">${badge(e.status)}</td>` +
      `<td>${truth}</td>` +
      `<td>${e.cooccurrence ?? ""}</td></tr>`;
  }).join("");
}

/** One pair as a detail card; the score view and every grid cell use
 * this same path, so a 1x1 grid renders exactly like a score lookup. */
export function renderScoreCell(cell: ScoreCell): string {
  const truth = cell.true_score === null
    ? ""
    : ` true ${scoreSpan(cell.true_score)}`;
  return `<div class="cell" style="background:${scoreColor(cell.predicted_score)}" ` +
    `data-a="${escapeHtml(cell.a)}" data-b="${escapeHtml(cell.b)}">` +
    `${scoreSpan(cell.predicted_score)}` +
    `<span class="badge" title="${cell.status}">${badge(cell.status)}</span>` +
    `${truth}</div>`;
}

export function renderGrid(resp: CompareResponse,
                           threshold: number | null): string {
  const head = `<tr><th></th>${resp.probes.map((p) =>
    `<th class="token">${escapeHtml(p)}</th>`).join("")}</tr>`;
  const rows = resp.grid.map((row, i) =>
    `<tr><th class="token">${escapeHtml(resp.targets[i])}</th>` +
    `${row.map((cell) => `<td>${renderScoreCell(cell)}</td>`).join("")}</tr>`,
  ).join("");
  const mark = threshold === null
    ? ""
    : ` <span class="mark">complementary at &ge; ` +
      `<span data-threshold="${fullPrecision(threshold)}">` +
      `${displayScore(threshold)}</span></span>`;
  const legend = `<p class="legend">score scale -1 (cold) to +1 (warm); ` +
    `† known, * unknown${mark}</p>`;
  return `<table class="grid">${head}${rows}</table>${legend}`;
}

export function renderSuggestions(tokens: string[]): string {
  return tokens.map((t) =>
    `<button class="chip" data-token="${escapeHtml(t)}">` +
    `${escapeHtml(t)}</button>`,
  ).join("");
}

export function renderError(message: string): string {
  return `<span class="error">${escapeHtml(message)}</span> ` +
    `<button class="retry">retry</button>`;
}
