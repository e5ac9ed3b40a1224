/** Display formatting. Scores show 4 decimals; the full serialized
 * precision lives in tooltips. String(x) re-emits the shortest
 * round-trip decimal, i.e. exactly the digits the API sent. */

import type { PairStatus } from "./api.js";

export function displayScore(x: number): string {
  return x.toFixed(4);
}

export function fullPrecision(x: number): string {
  return String(x);
}

// known pairs carry a dagger, unknown (model-only) pairs a star
export function badge(status: PairStatus): string {
  return status === "known" ? "†" : "*";
}

export function escapeHtml(raw: string): string {
  return raw
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

/** Score to a background color: -1 cold blue through white to +1 warm
 * red. Purely cosmetic; the displayed numbers stay payload-exact. */
export function scoreColor(x: number): string {
  const clamped = Math.max(-1, Math.min(1, x));
  const strength = Math.round(Math.abs(clamped) * 38);
  return clamped >= 0
    ? `hsl(8, 72%, ${97 - strength}%)`
    : `hsl(215, 62%, ${97 - strength}%)`;
}
