/** Raised for transport failures and structured engine errors alike. */
export class ApiError extends Error {
    code;
    constructor(code, message) {
        super(message);
        this.name = "ApiError";
        this.code = code;
    }
}
// Arrow wrapper so the global fetch keeps its expected `this` binding.
const defaultFetch = (input, init) => fetch(input, init);
function isHit(value) {
    if (typeof value !== "object" || value === null)
        return false;
    const hit = value;
    return (typeof hit.chunk_id === "string" &&
        typeof hit.score === "number" &&
        typeof hit.snippet === "string");
}
export function isQueryResponse(value) {
    if (typeof value !== "object" || value === null)
        return false;
    const body = value;
    if (typeof body.answer !== "string")
        return false;
    if (body.mode !== "rag" && body.mode !== "vanilla")
        return false;
    if (body.hits === null)
        return true;
    return Array.isArray(body.hits) && body.hits.every(isHit);
}
async function errorFromResponse(response) {
    let code = `http_${response.status}`;
    let message = response.statusText || `request failed with status ${response.status}`;
    try {
        const body = (await response.json());
        if (body.error && typeof body.error.code === "string")
            code = body.error.code;
        if (body.error && typeof body.error.message === "string")
            message = body.error.message;
    }
    catch {
        // Non-JSON error body; fall back to the status-derived code.
    }
    return new ApiError(code, message);
}
async function requestJson(url, init, fetchFn) {
    let response;
    try {
        response = await fetchFn(url, init);
    }
    catch (exc) {
        const detail = exc instanceof Error ? exc.message : String(exc);
        throw new ApiError("unreachable", `engine unreachable: ${detail}`);
    }
    if (!response.ok)
        throw await errorFromResponse(response);
    try {
        return await response.json();
    }
    catch {
        throw new ApiError("bad_payload", "response body was not valid JSON");
    }
}
/** POST /query. Resolves to the parsed response or rejects with ApiError. */
export async function postQuery(baseUrl, question, mode, fetchFn = defaultFetch) {
    const payload = await requestJson(`${baseUrl}/query`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ question, mode }),
    }, fetchFn);
    if (!isQueryResponse(payload)) {
        throw new ApiError("bad_payload", "response did not match the query schema");
    }
    return payload;
}
/** GET /healthz. */
export async function getHealth(baseUrl, fetchFn = defaultFetch) {
    const payload = await requestJson(`${baseUrl}/healthz`, undefined, fetchFn);
    const body = payload;
    if (typeof body?.status !== "string" || typeof body?.index_entries !== "number") {
        throw new ApiError("bad_payload", "health response did not match the schema");
    }
    return { status: body.status, index_entries: body.index_entries };
}
/** GET /config: the engine's effective non-secret configuration. */
export async function getConfig(baseUrl, fetchFn = defaultFetch) {
    const payload = await requestJson(`${baseUrl}/config`, undefined, fetchFn);
    if (typeof payload !== "object" || payload === null || Array.isArray(payload)) {
        throw new ApiError("bad_payload", "config response was not an object");
    }
    return payload;
}
