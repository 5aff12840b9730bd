/** Pure display formatting helpers. */

/** Format a confidence fraction in [0, 1] with one decimal: 0.8864 -> "88.6%". */
export function formatPercent(fraction: number): string {
  return `${(Math.round(fraction * 1000) / 10).toFixed(1)}%`;
}

/** The wire already carries a percentage (one decimal); absent stays absent. */
export function formatConfidencePct(pct: number | null): string | null {
  return pct === null ? null : `${pct.toFixed(1)}%`;
}

/** Character counter line for the input box. */
export function formatCharCount(length: number, limit: number): string {
  return `${length.toLocaleString("en-US")} / ${limit.toLocaleString("en-US")} characters`;
}
