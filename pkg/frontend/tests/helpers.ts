import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { FetchLike } from "../src/api.js";
import { initApp } from "../src/app.js";
import type { AppHandles } from "../src/app.js";
import type { Hit, QueryResponse } from "../src/types.js";

const HERE = dirname(fileURLToPath(import.meta.url));
const INDEX_HTML = readFileSync(join(HERE, "..", "public", "index.html"), "utf8");

/** Inject the real page markup (scripts stripped) into the test document. */
export function mountMarkup(): void {
  const body = /<body>([\s\S]*)<\/body>/.exec(INDEX_HTML);
  if (!body || body[1] === undefined) throw new Error("index.html has no <body>");
  document.body.innerHTML = body[1].replace(/<script[\s\S]*?<\/script>/g, "");
}

export function mountApp(fetchFn?: FetchLike, baseUrl = ""): AppHandles {
  mountMarkup();
  return initApp(document, baseUrl, fetchFn);
}

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

/** Fetch stub that dispatches on URL suffix; unrouted paths reject. */
export function routedFetch(
  routes: Record<string, () => Response | Promise<Response>>,
): FetchLike {
  return async (input) => {
    for (const [suffix, handler] of Object.entries(routes)) {
      if (input.endsWith(suffix)) return handler();
    }
    throw new TypeError(`no route for ${input}`);
  };
}

export function makeHit(overrides: Partial<Hit> = {}): Hit {
  return {
    chunk_id: "doc000:0",
    score: 0.4811,
    snippet: "The relay unit 000 operates at 88 MHz.",
    ...overrides,
  };
}

export function ragResponse(overrides: Partial<QueryResponse> = {}): QueryResponse {
  return {
    answer: "The relay unit 000 operates at 88 MHz.",
    mode: "rag",
    hits: [makeHit()],
    timing_ms: { embed_ms: 0.21, search_ms: 0.08, generate_ms: 0.02, total_ms: 0.35 },
    ...overrides,
  };
}

export function vanillaResponse(overrides: Partial<QueryResponse> = {}): QueryResponse {
  return {
    answer: "I do not have enough information to answer that.",
    mode: "vanilla",
    hits: null,
    timing_ms: { generate_ms: 0.02, total_ms: 0.04 },
    ...overrides,
  };
}
