import { describe, expect, it, vi } from "vitest";

import { ApiError, getConfig, getHealth, isQueryResponse, postQuery } from "../src/api.js";
import { jsonResponse, ragResponse, vanillaResponse } from "./helpers.js";

async function expectApiError(promise: Promise<unknown>, code: string): Promise<ApiError> {
  try {
    await promise;
  } catch (exc) {
    expect(exc).toBeInstanceOf(ApiError);
    const error = exc as ApiError;
    expect(error.code).toBe(code);
    return error;
  }
  throw new Error(`expected ApiError with code ${code}, but the call succeeded`);
}

describe("postQuery", () => {
  it("sends the question and mode, returns the parsed response", async () => {
    const payload = ragResponse();
    const fetchFn = vi.fn(async (_url: string, _init?: RequestInit) => jsonResponse(payload));
    const response = await postQuery("http://engine", "what frequency?", "rag", fetchFn);
    expect(response).toEqual(payload);
    expect(fetchFn).toHaveBeenCalledTimes(1);
    const [url, init] = fetchFn.mock.calls[0] as [string, RequestInit];
    expect(url).toBe("http://engine/query");
    expect(init.method).toBe("POST");
    expect(JSON.parse(init.body as string)).toEqual({
      question: "what frequency?",
      mode: "rag",
    });
  });

  it("accepts a vanilla response with null hits", async () => {
    const response = await postQuery("", "q", "vanilla", async () =>
      jsonResponse(vanillaResponse()),
    );
    expect(response.hits).toBeNull();
    expect(response.mode).toBe("vanilla");
  });

  it("surfaces structured engine errors by code", async () => {
    const body = { error: { code: "empty_question", message: "question must be non-empty" } };
    const error = await expectApiError(
      postQuery("", "", "rag", async () => jsonResponse(body, 400)),
      "empty_question",
    );
    expect(error.message).toContain("non-empty");
  });

  it("falls back to an http_<status> code for non-JSON error bodies", async () => {
    const fetchFn = async () => new Response("gateway exploded", { status: 503 });
    await expectApiError(postQuery("", "q", "rag", fetchFn), "http_503");
  });

  it("maps network failures to the unreachable code", async () => {
    const fetchFn = async () => {
      throw new TypeError("fetch failed");
    };
    const error = await expectApiError(postQuery("", "q", "rag", fetchFn), "unreachable");
    expect(error.message).toContain("fetch failed");
  });

  it("rejects 200 responses that do not match the schema", async () => {
    await expectApiError(
      postQuery("", "q", "rag", async () => jsonResponse({ answer: 7, mode: "rag", hits: null })),
      "bad_payload",
    );
  });

  it("rejects 200 responses that are not JSON at all", async () => {
    const fetchFn = async () => new Response("<html>hi</html>", { status: 200 });
    await expectApiError(postQuery("", "q", "rag", fetchFn), "bad_payload");
  });
});

describe("isQueryResponse", () => {
  it("accepts both wire shapes", () => {
    expect(isQueryResponse(ragResponse())).toBe(true);
    expect(isQueryResponse(vanillaResponse())).toBe(true);
  });

  it("rejects malformed hits", () => {
    expect(isQueryResponse({ answer: "a", mode: "rag", hits: [{ chunk_id: 1 }] })).toBe(false);
    expect(isQueryResponse({ answer: "a", mode: "hybrid", hits: null })).toBe(false);
    expect(isQueryResponse(null)).toBe(false);
    expect(isQueryResponse("answer")).toBe(false);
  });
});

describe("getHealth", () => {
  it("parses the health body", async () => {
    const fetchFn = vi.fn(async (_url: string) => jsonResponse({ status: "ok", index_entries: 42 }));
    const health = await getHealth("http://engine", fetchFn);
    expect(health).toEqual({ status: "ok", index_entries: 42 });
    expect(fetchFn.mock.calls[0]?.[0]).toBe("http://engine/healthz");
  });

  it("rejects malformed health bodies", async () => {
    await expectApiError(
      getHealth("", async () => jsonResponse({ status: "ok" })),
      "bad_payload",
    );
  });
});

describe("getConfig", () => {
  it("returns the config object", async () => {
    const config = await getConfig("", async () => jsonResponse({ gen: { mode: "rag" } }));
    expect(config).toEqual({ gen: { mode: "rag" } });
  });

  it("rejects non-object config bodies", async () => {
    await expectApiError(getConfig("", async () => jsonResponse([1, 2])), "bad_payload");
  });
});
