import { ApiError, getHealth, postQuery } from "./api.js";
import { renderTurn } from "./render.js";
import { TranscriptStore } from "./state.js";
function mustFind(doc, selector) {
    const node = doc.querySelector(selector);
    if (!node)
        throw new Error(`missing required element: ${selector}`);
    return node;
}
/**
 * Wire the chat page. `baseUrl` is "" in production (same-origin requests
 * from /ui); tests pass an explicit origin or a mocked fetch.
 */
export function initApp(doc, baseUrl = "", fetchFn) {
    const form = mustFind(doc, "#chat-form");
    const input = mustFind(doc, "#question-input");
    const sendButton = mustFind(doc, "#send-button");
    const modeButton = mustFind(doc, "#mode-toggle");
    const transcript = mustFind(doc, "#transcript");
    const status = mustFind(doc, "#engine-status");
    const store = new TranscriptStore();
    let rendered = 0;
    function paint() {
        // Append-only transcript: render just the turns added since last paint.
        const turns = store.list();
        for (; rendered < turns.length; rendered += 1) {
            const turn = turns[rendered];
            if (turn)
                transcript.append(renderTurn(doc, turn));
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
    async function submitQuestion(question) {
        const trimmed = question.trim();
        if (trimmed === "" || !store.begin())
            return;
        // Captured before the await so the turn badge matches the request body
        // even if the mode is toggled while the question is in flight.
        const mode = store.mode;
        const turn = {
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
        }
        catch (exc) {
            if (exc instanceof ApiError) {
                turn.error = `${exc.code}: ${exc.message}`;
            }
            else {
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
    async function refreshStatus() {
        try {
            const health = await getHealth(baseUrl, fetchFn);
            status.textContent = `engine ok · ${health.index_entries} indexed chunks`;
            status.classList.remove("status-down");
        }
        catch {
            status.textContent = "engine unreachable";
            status.classList.add("status-down");
        }
    }
    void refreshStatus();
    return { store, submitQuestion, refreshStatus };
}
