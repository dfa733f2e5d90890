// Dashboard number formatting. The rule everywhere: a value the server
// does not have yet renders as its status word, never as NaN.

import type { Chi2Block, KappaBlock } from "./types.js";

export function formatKappa(block: KappaBlock): string {
  if (block.status !== "ok" || block.kappa === null || !Number.isFinite(block.kappa)) {
    return block.status === "degenerate" ? "degenerate" : "pending";
  }
  return block.kappa.toFixed(2);
}

export function formatChi2(block: Chi2Block): string {
  if (block.status !== "ok" || block.statistic === null || block.p_value === null) {
    return "pending";
  }
  return `chi-squared = ${block.statistic.toFixed(2)}, df = ${block.df}, p = ${block.p_value.toFixed(3)}`;
}

export function formatPercent(pct: number): string {
  if (!Number.isFinite(pct)) return "0%";
  return `${Math.round(pct)}%`;
}

// Width of a percentage bar; bad input collapses to zero rather than
// producing an invalid style.
export function barWidth(pct: number): number {
  if (!Number.isFinite(pct)) return 0;
  return Math.min(100, Math.max(0, pct));
}
