/** Pure display helpers. */

/** Snippet length shown before the expand control appears. */
export const SNIPPET_DISPLAY_LIMIT = 400;

/**
 * Scores render with exactly three decimals. Display-only: the value and
 * the engine's ordering are never altered client-side.
 */
export function formatScore(score: number): string {
  if (!Number.isFinite(score)) return String(score);
  return score.toFixed(3);
}

export interface SnippetView {
  display: string;
  truncated: boolean;
}

export function truncateSnippet(
  text: string,
  limit: number = SNIPPET_DISPLAY_LIMIT,
): SnippetView {
  if (text.length <= limit) return { display: text, truncated: false };
  return { display: text.slice(0, limit), truncated: true };
}

/** Wall-clock time of a turn, or "" for an unparseable timestamp. */
export function formatTimestamp(iso: string): string {
  const date = new Date(iso);
  if (Number.isNaN(date.getTime())) return "";
  return date.toLocaleTimeString([], { hour12: false });
}
