/** Wire and client-side types shared across the chat UI. */

export type Mode = "rag" | "vanilla";

/** One retrieved context, exactly as the engine scored and ordered it. */
export interface Hit {
  chunk_id: string;
  score: number;
  snippet: string;
}

/** Body of a successful POST /query response. */
export interface QueryResponse {
  answer: string;
  mode: Mode;
  /** Ranked contexts in rag mode; null in vanilla mode. */
  hits: Hit[] | null;
  timing_ms?: Record<string, number>;
}

/**
 * One transcript entry. Mirrors the query response field-for-field, plus
 * the question that produced it and client-side bookkeeping. History lives
 * only in memory: a reload starts an empty transcript.
 */
export interface ChatTurn {
  question: string;
  answer: string;
  hits: Hit[] | null;
  mode: Mode;
  timestamp: string;
  /** Set when the request failed; the turn renders as an inline error. */
  error: string | null;
}

/** Body of GET /healthz. */
export interface HealthInfo {
  status: string;
  index_entries: number;
}
