import { ApiError, getHealth, postQuery } from "./api.js";
import type { FetchLike } from "./api.js";
import { renderTurn } from "./render.js";
import { TranscriptStore } from "./state.js";
import type { ChatTurn } from "./types.js";

export interface AppHandles {
  store: TranscriptStore;
  /** Submit programmatically; resolves once the turn has been appended. */
  submitQuestion(question: string): Promise<void>;
  /** Re-query /healthz and repaint the status line. */
  refreshStatus(): Promise<void>;
}

function mustFind<T extends Element>(doc: Document, selector: string): T {
  const node = doc.querySelector(selector);
  if (!node) throw new Error(`missing required element: ${selector}`);
  return node as T;
}

/**
 * Wire the chat page. `baseUrl` is "" in production (same-origin requests
 * from /ui); tests pass an explicit origin or a mocked fetch.
 */
export function initApp(doc: Document, baseUrl = "", fetchFn?: FetchLike): AppHandles {
  const form = mustFind<HTMLFormElement>(doc, "#chat-form");
  const input = mustFind<HTMLInputElement>(doc, "#question-input");
  const sendButton = mustFind<HTMLButtonElement>(doc, "#send-button");
  const modeButton = mustFind<HTMLButtonElement>(doc, "#mode-toggle");
  const transcript = mustFind<HTMLElement>(doc, "#transcript");
  const status = mustFind<HTMLElement>(doc, "#engine-status");

  const store = new TranscriptStore();
  let rendered = 0;

  function paint(): void {
    // Append-only transcript: render just the turns added since last paint.
    const turns = store.list();
    for (; rendered < turns.length; rendered += 1) {
      const turn = turns[rendered];
      if (turn) transcript.append(renderTurn(doc, turn));
    }
    input.disabled = store.pending;
    sendButton.disabled = store.pending;
    modeButton.textContent = `mode: ${store.mode}`;
    modeButton.dataset.mode = store.mode;
  }

  store.subscribe(paint);
  paint();

  modeButton.addEventListener("click", () => {
    store.toggleMode();
  });

  async function submitQuestion(question: string): Promise<void> {
    const trimmed = question.trim();
    if (trimmed === "" || !store.begin()) return;
    // Captured before the await so the turn badge matches the request body
    // even if the mode is toggled while the question is in flight.
    const mode = store.mode;
    const turn: ChatTurn = {
      question: trimmed,
      answer: "",
      hits: null,
      mode,
      timestamp: new Date().toISOString(),
      error: null,
    };
    try {
      const response = await postQuery(baseUrl, trimmed, mode, fetchFn);
      turn.answer = response.answer;
      turn.hits = response.hits;
      input.value = "";
    } catch (exc) {
      if (exc instanceof ApiError) {
        turn.error = `${exc.code}: ${exc.message}`;
      } else {
        turn.error = exc instanceof Error ? exc.message : String(exc);
      }
      // Input text is kept on failure so the question can be retried.
    }
    store.finish(turn);
  }

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    void submitQuestion(input.value);
  });

  async function refreshStatus(): Promise<void> {
    try {
      const health = await getHealth(baseUrl, fetchFn);
      status.textContent = `engine ok · ${health.index_entries} indexed chunks`;
      status.classList.remove("status-down");
    } catch {
      status.textContent = "engine unreachable";
      status.classList.add("status-down");
    }
  }

  void refreshStatus();

  return { store, submitQuestion, refreshStatus };
}
