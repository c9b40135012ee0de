import type { HealthInfo, Hit, Mode, QueryResponse } from "./types.js";

/** Raised for transport failures and structured engine errors alike. */
export class ApiError extends Error {
  readonly code: string;

  constructor(code: string, message: string) {
    super(message);
    this.name = "ApiError";
    this.code = code;
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

// Arrow wrapper so the global fetch keeps its expected `this` binding.
const defaultFetch: FetchLike = (input, init) => fetch(input, init);

function isHit(value: unknown): value is Hit {
  if (typeof value !== "object" || value === null) return false;
  const hit = value as Record<string, unknown>;
  return (
    typeof hit.chunk_id === "string" &&
    typeof hit.score === "number" &&
    typeof hit.snippet === "string"
  );
}

export function isQueryResponse(value: unknown): value is QueryResponse {
  if (typeof value !== "object" || value === null) return false;
  const body = value as Record<string, unknown>;
  if (typeof body.answer !== "string") return false;
  if (body.mode !== "rag" && body.mode !== "vanilla") return false;
  if (body.hits === null) return true;
  return Array.isArray(body.hits) && body.hits.every(isHit);
}

async function errorFromResponse(response: Response): Promise<ApiError> {
  let code = `http_${response.status}`;
  let message = response.statusText || `request failed with status ${response.status}`;
  try {
    const body = (await response.json()) as { error?: { code?: unknown; message?: unknown } };
    if (body.error && typeof body.error.code === "string") code = body.error.code;
    if (body.error && typeof body.error.message === "string") message = body.error.message;
  } catch {
    // Non-JSON error body; fall back to the status-derived code.
  }
  return new ApiError(code, message);
}

async function requestJson(
  url: string,
  init: RequestInit | undefined,
  fetchFn: FetchLike,
): Promise<unknown> {
  let response: Response;
  try {
    response = await fetchFn(url, init);
  } catch (exc) {
    const detail = exc instanceof Error ? exc.message : String(exc);
    throw new ApiError("unreachable", `engine unreachable: ${detail}`);
  }
  if (!response.ok) throw await errorFromResponse(response);
  try {
    return await response.json();
  } catch {
    throw new ApiError("bad_payload", "response body was not valid JSON");
  }
}

/** POST /query. Resolves to the parsed response or rejects with ApiError. */
export async function postQuery(
  baseUrl: string,
  question: string,
  mode: Mode,
  fetchFn: FetchLike = defaultFetch,
): Promise<QueryResponse> {
  const payload = await requestJson(
    `${baseUrl}/query`,
    {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ question, mode }),
    },
    fetchFn,
  );
  if (!isQueryResponse(payload)) {
    throw new ApiError("bad_payload", "response did not match the query schema");
  }
  return payload;
}

/** GET /healthz. */
export async function getHealth(
  baseUrl: string,
  fetchFn: FetchLike = defaultFetch,
): Promise<HealthInfo> {
  const payload = await requestJson(`${baseUrl}/healthz`, undefined, fetchFn);
  const body = payload as Record<string, unknown>;
  if (typeof body?.status !== "string" || typeof body?.index_entries !== "number") {
    throw new ApiError("bad_payload", "health response did not match the schema");
  }
  return { status: body.status, index_entries: body.index_entries };
}

/** GET /config: the engine's effective non-secret configuration. */
export async function getConfig(
  baseUrl: string,
  fetchFn: FetchLike = defaultFetch,
): Promise<Record<string, unknown>> {
  const payload = await requestJson(`${baseUrl}/config`, undefined, fetchFn);
  if (typeof payload !== "object" || payload === null || Array.isArray(payload)) {
    throw new ApiError("bad_payload", "config response was not an object");
  }
  return payload as Record<string, unknown>;
}
