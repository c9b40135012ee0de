import { describe, expect, it } from "vitest";

import {
  SNIPPET_DISPLAY_LIMIT,
  formatScore,
  formatTimestamp,
  truncateSnippet,
} from "../src/format.js";

describe("formatScore", () => {
  it("renders three decimals", () => {
    expect(formatScore(0.4811)).toBe("0.481");
    expect(formatScore(1)).toBe("1.000");
    expect(formatScore(0)).toBe("0.000");
  });

  it("rounds only at the third decimal", () => {
    expect(formatScore(0.99996)).toBe("1.000");
    expect(formatScore(0.1234)).toBe("0.123");
    // 0.1235 is stored below the midpoint (0.12349999...), so pick a value
    // that is unambiguously above it.
    expect(formatScore(0.12351)).toBe("0.124");
  });

  it("passes through non-finite values verbatim", () => {
    expect(formatScore(Number.NaN)).toBe("NaN");
    expect(formatScore(Number.POSITIVE_INFINITY)).toBe("Infinity");
  });
});

describe("truncateSnippet", () => {
  it("leaves short text alone", () => {
    const text = "x".repeat(SNIPPET_DISPLAY_LIMIT);
    expect(truncateSnippet(text)).toEqual({ display: text, truncated: false });
  });

  it("cuts at exactly the display limit", () => {
    const text = "y".repeat(SNIPPET_DISPLAY_LIMIT + 1);
    const view = truncateSnippet(text);
    expect(view.truncated).toBe(true);
    expect(view.display).toHaveLength(SNIPPET_DISPLAY_LIMIT);
    expect(view.display).toBe(text.slice(0, SNIPPET_DISPLAY_LIMIT));
  });

  it("honors a custom limit", () => {
    expect(truncateSnippet("abcdef", 4)).toEqual({ display: "abcd", truncated: true });
  });
});

describe("formatTimestamp", () => {
  it("formats a valid ISO timestamp as wall-clock time", () => {
    expect(formatTimestamp(new Date().toISOString())).toMatch(/\d{1,2}:\d{2}:\d{2}/);
  });

  it("returns empty string for garbage", () => {
    expect(formatTimestamp("not a date")).toBe("");
  });
});
