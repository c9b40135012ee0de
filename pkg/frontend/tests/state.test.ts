import { describe, expect, it, vi } from "vitest";

import { TranscriptStore } from "../src/state.js";
import type { ChatTurn } from "../src/types.js";

function turn(overrides: Partial<ChatTurn> = {}): ChatTurn {
  return {
    question: "q",
    answer: "a",
    hits: null,
    mode: "rag",
    timestamp: new Date().toISOString(),
    error: null,
    ...overrides,
  };
}

describe("TranscriptStore", () => {
  it("starts in rag mode with an empty transcript", () => {
    const store = new TranscriptStore();
    expect(store.mode).toBe("rag");
    expect(store.pending).toBe(false);
    expect(store.size).toBe(0);
  });

  it("toggles between the two modes", () => {
    const store = new TranscriptStore();
    expect(store.toggleMode()).toBe("vanilla");
    expect(store.mode).toBe("vanilla");
    expect(store.toggleMode()).toBe("rag");
    expect(store.mode).toBe("rag");
  });

  it("allows a single in-flight question", () => {
    const store = new TranscriptStore();
    expect(store.begin()).toBe(true);
    expect(store.pending).toBe(true);
    expect(store.begin()).toBe(false);
    store.finish(turn());
    expect(store.pending).toBe(false);
    expect(store.begin()).toBe(true);
  });

  it("appends turns in order and never loses earlier ones", () => {
    const store = new TranscriptStore();
    store.begin();
    store.finish(turn({ question: "first" }));
    store.begin();
    store.finish(turn({ question: "second", error: "unreachable: engine down" }));
    expect(store.size).toBe(2);
    expect(store.at(0)?.question).toBe("first");
    expect(store.at(1)?.question).toBe("second");
    expect(store.at(1)?.error).toContain("unreachable");
    expect(store.list().map((entry) => entry.question)).toEqual(["first", "second"]);
  });

  it("notifies subscribers on every state change", () => {
    const store = new TranscriptStore();
    const listener = vi.fn();
    const unsubscribe = store.subscribe(listener);
    store.toggleMode();
    store.begin();
    store.finish(turn());
    expect(listener).toHaveBeenCalledTimes(3);
    unsubscribe();
    store.toggleMode();
    expect(listener).toHaveBeenCalledTimes(3);
  });
});
