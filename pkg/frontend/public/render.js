import { formatScore, formatTimestamp, truncateSnippet } from "./format.js";
function el(doc, tag, className, text) {
    const node = doc.createElement(tag);
    if (className)
        node.className = className;
    if (text !== undefined)
        node.textContent = text;
    return node;
}
function renderHit(doc, hit, rank) {
    const item = el(doc, "li", "hit");
    const header = el(doc, "div", "hit-header");
    header.append(el(doc, "span", "hit-rank", `${rank}.`), el(doc, "span", "hit-score", formatScore(hit.score)), el(doc, "span", "hit-id", hit.chunk_id));
    item.append(header);
    const view = truncateSnippet(hit.snippet);
    const snippet = el(doc, "p", "hit-snippet", view.display);
    item.append(snippet);
    if (view.truncated) {
        const expand = el(doc, "button", "hit-expand", "show full snippet");
        expand.type = "button";
        expand.addEventListener("click", () => {
            snippet.textContent = hit.snippet;
            expand.remove();
        });
        item.append(expand);
    }
    return item;
}
function renderContextPanel(doc, hits) {
    const panel = el(doc, "details", "context-panel");
    panel.open = true;
    panel.append(el(doc, "summary", "context-summary", `retrieved contexts (${hits.length})`));
    const list = el(doc, "ol", "hit-list");
    hits.forEach((hit, index) => list.append(renderHit(doc, hit, index + 1)));
    panel.append(list);
    return panel;
}
/** Build the DOM for one transcript entry. */
export function renderTurn(doc, turn) {
    const root = el(doc, "article", turn.error === null ? "turn" : "turn turn-failed");
    const header = el(doc, "header", "turn-header");
    header.append(el(doc, "span", `mode-badge mode-${turn.mode}`, turn.mode), el(doc, "span", "turn-time", formatTimestamp(turn.timestamp)));
    root.append(header);
    root.append(el(doc, "p", "turn-question", turn.question));
    if (turn.error !== null) {
        root.append(el(doc, "p", "turn-error", turn.error));
        return root;
    }
    root.append(el(doc, "p", "turn-answer", turn.answer));
    // Context panel only in rag mode; vanilla turns carry no hits at all.
    if (turn.mode === "rag" && turn.hits && turn.hits.length > 0) {
        root.append(renderContextPanel(doc, turn.hits));
    }
    return root;
}
