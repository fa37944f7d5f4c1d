// Advice rendering. Every displayed number is lifted verbatim from the raw
// response body (Python and JS print the same double differently, so the
// parsed values are used only for bar geometry, never for display).

import type { AdviceResult } from "./api.js";

export interface RankedSeatRaw {
  seat: number;
  scoreText: string; // exact substring of the response body
}

const RANKING_RE = /\{"seat":(\d+),"score":([^}]+)\}/g;
const SCORES_RE = /"scores":\[([^\]]*)\]/;
const TARGET_RE = /"target":(\d+)/;

export function extractRankingRaw(raw: string): RankedSeatRaw[] {
  const out: RankedSeatRaw[] = [];
  for (const m of raw.matchAll(RANKING_RE)) {
    out.push({ seat: Number(m[1]), scoreText: m[2] });
  }
  return out;
}

export function extractScoresRaw(raw: string): string[] {
  const m = raw.match(SCORES_RE);
  return m ? m[1].split(",") : [];
}

export function extractTargetRaw(raw: string): string {
  const m = raw.match(TARGET_RE);
  if (!m) throw new Error("response has no target field");
  return m[1];
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Bar widths in [5, 100] percent from the ranked scores (display geometry
 *  only; the labels next to the bars carry the verbatim server numbers). */
export function barWidths(scores: number[]): number[] {
  if (scores.length === 0) return [];
  const lo = Math.min(...scores);
  const hi = Math.max(...scores);
  const span = hi - lo;
  if (span === 0) return scores.map(() => 100);
  return scores.map((s) => 5 + (95 * (s - lo)) / span);
}

export function renderAdvice(result: AdviceResult, seatLabels: string[]): string {
  const { parsed, raw } = result;
  const ranked = extractRankingRaw(raw);
  const widths = barWidths(parsed.ranking.map((r) => r.score));
  const badges: string[] = [];
  if (parsed.meta.no_signal) badges.push('<span class="badge">no signal</span>');
  if (parsed.meta.partial) badges.push('<span class="badge">partial game</span>');
  const bars = ranked
    .map((r, i) => {
      const label = escapeHtml(seatLabels[r.seat] ?? `Seat ${r.seat}`);
      const target = r.seat === parsed.target ? " bar-target" : "";
      return (
        `<div class="bar-row"><span class="bar-label">${label}</span>` +
        `<div class="bar${target}" style="width:${widths[i].toFixed(1)}%"></div>` +
        `<span class="bar-score">${escapeHtml(r.scoreText)}</span></div>`
      );
    })
    .join("");
  const targetLabel = escapeHtml(seatLabels[parsed.target] ?? `Seat ${parsed.target}`);
  return (
    `<p class="target-line">Shoot <strong>${targetLabel}</strong>` +
    ` (seat ${extractTargetRaw(raw)}) ${badges.join(" ")}</p>` +
    `<div class="bars">${bars}</div>` +
    `<details><summary>raw response</summary>` +
    `<pre class="raw-json">${escapeHtml(raw)}</pre></details>`
  );
}
