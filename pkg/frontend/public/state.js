/**
 * Append-only transcript plus the two bits of UI state that gate input:
 * the selected mode and whether a question is in flight. There is no
 * removal or clearing API; a page reload is the only reset.
 */
export class TranscriptStore {
    turns = [];
    listeners = new Set();
    currentMode = "rag";
    inFlight = false;
    get mode() {
        return this.currentMode;
    }
    get pending() {
        return this.inFlight;
    }
    get size() {
        return this.turns.length;
    }
    list() {
        return this.turns;
    }
    at(index) {
        return this.turns[index];
    }
    toggleMode() {
        this.currentMode = this.currentMode === "rag" ? "vanilla" : "rag";
        this.notify();
        return this.currentMode;
    }
    /** Claim the single in-flight slot; false when a question is already out. */
    begin() {
        if (this.inFlight)
            return false;
        this.inFlight = true;
        this.notify();
        return true;
    }
    /** Append the finished turn (success or inline error) and release the slot. */
    finish(turn) {
        this.turns.push(turn);
        this.inFlight = false;
        this.notify();
    }
    subscribe(listener) {
        this.listeners.add(listener);
        return () => {
            this.listeners.delete(listener);
        };
    }
    notify() {
        for (const listener of this.listeners)
            listener();
    }
}
