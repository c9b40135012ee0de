import type { ChatTurn, Mode } from "./types.js";

type Listener = () => void;

/**
 * Append-only transcript plus the two bits of UI state that gate input:
 * the selected mode and whether a question is in flight. There is no
 * removal or clearing API; a page reload is the only reset.
 */
export class TranscriptStore {
  private readonly turns: ChatTurn[] = [];
  private readonly listeners = new Set<Listener>();
  private currentMode: Mode = "rag";
  private inFlight = false;

  get mode(): Mode {
    return this.currentMode;
  }

  get pending(): boolean {
    return this.inFlight;
  }

  get size(): number {
    return this.turns.length;
  }

  list(): readonly ChatTurn[] {
    return this.turns;
  }

  at(index: number): ChatTurn | undefined {
    return this.turns[index];
  }

  toggleMode(): Mode {
    this.currentMode = this.currentMode === "rag" ? "vanilla" : "rag";
    this.notify();
    return this.currentMode;
  }

  /** Claim the single in-flight slot; false when a question is already out. */
  begin(): boolean {
    if (this.inFlight) return false;
    this.inFlight = true;
    this.notify();
    return true;
  }

  /** Append the finished turn (success or inline error) and release the slot. */
  finish(turn: ChatTurn): void {
    this.turns.push(turn);
    this.inFlight = false;
    this.notify();
  }

  subscribe(listener: Listener): () => void {
    this.listeners.add(listener);
    return () => {
      this.listeners.delete(listener);
    };
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }
}
