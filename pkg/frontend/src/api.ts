/**
 * Typed client for the tile service's three endpoints.
 *
 * All functions take the fetch implementation as an (injectable)
 * parameter so the request/retry/cancellation logic is testable without
 * a browser. Errors the server explains (4xx JSON bodies) are returned
 * as values, not thrown — the UI shows them in a banner; transient 5xx
 * responses are retried with exponential backoff.
 */

import type { ViewState } from "./viewstate.js";

export type FetchLike = (
  url: string,
  init?: { signal?: AbortSignal; method?: string; headers?: Record<string, string>; body?: string },
) => Promise<Response>;

export interface PaletteInfo {
  id: string;
  size: number;
  interior: [number, number, number];
}

export interface SeriesTerm {
  degree: number;
  [field: string]: unknown;
}

export type Classification =
  | "EmbeddedMultibrot"
  | "LinearTermBlocks"
  | "LaurentPole"
  | "ConstantOnly";

export interface AnalysisReport {
  expr: string;
  classification: Classification;
  predicted_order: number | null;
  regime: string;
  note: string | null;
  suggested_radius: number | null;
  series: { order: number; terms: SeriesTerm[] };
}

/** A request the server rejected with an explanation. */
export interface ApiError {
  status: number;
  error: string;
  /** Character offset into the expression, for parse errors. */
  offset?: number;
  /** The unsupported construct, for not-series-expandable (422) errors. */
  construct?: string;
}

export type ApiResult<T> = { ok: true; value: T } | { ok: false; error: ApiError };

async function errorFromResponse(response: Response): Promise<ApiError> {
  let error = `HTTP ${response.status}`;
  let offset: number | undefined;
  let construct: string | undefined;
  try {
    const body: unknown = await response.json();
    if (typeof body === "object" && body !== null) {
      const record = body as Record<string, unknown>;
      if (typeof record.error === "string") error = record.error;
      if (typeof record.offset === "number") offset = record.offset;
      if (typeof record.construct === "string") construct = record.construct;
    }
  } catch {
    // non-JSON body: keep the generic message
  }
  return { status: response.status, error, offset, construct };
}

const RETRIABLE_ATTEMPTS = 3;

function delay(ms: number, signal?: AbortSignal): Promise<void> {
  return new Promise((resolve, reject) => {
    const timer = setTimeout(resolve, ms);
    signal?.addEventListener(
      "abort",
      () => {
        clearTimeout(timer);
        reject(abortError());
      },
      { once: true },
    );
  });
}

function abortError(): Error {
  const err = new Error("aborted");
  err.name = "AbortError";
  return err;
}

/**
 * Fetch with retry on 5xx (exponential backoff starting at
 * `retryDelayMs`). 4xx responses are returned to the caller immediately.
 * Aborting the signal rejects with an AbortError at any stage.
 */
export async function fetchWithRetry(
  fetchFn: FetchLike,
  url: string,
  init?: Parameters<FetchLike>[1],
  retryDelayMs = 250,
): Promise<Response> {
  let lastResponse: Response | undefined;
  for (let attempt = 0; attempt < RETRIABLE_ATTEMPTS; attempt++) {
    if (init?.signal?.aborted) throw abortError();
    if (attempt > 0) {
      await delay(retryDelayMs * 2 ** (attempt - 1), init?.signal);
    }
    lastResponse = await fetchFn(url, init);
    if (lastResponse.status < 500) return lastResponse;
  }
  return lastResponse as Response;
}

/** Query URL for one tile render. */
export function tileUrl(
  baseUrl: string,
  view: Pick<ViewState, "expr" | "logK" | "maxIter" | "paletteId">,
  centerRe: number,
  centerIm: number,
  scale: number,
  width: number,
  height: number,
): string {
  const params = new URLSearchParams({
    expr: view.expr,
    center_re: String(centerRe),
    center_im: String(centerIm),
    scale: String(scale),
    width: String(width),
    height: String(height),
    log_k: String(view.logK),
    max_iter: String(view.maxIter),
    palette: view.paletteId,
  });
  return `${baseUrl}/api/tile?${params.toString()}`;
}

/** Fetch one tile as a PNG blob; 4xx becomes an ApiError value. */
export async function fetchTileBlob(
  fetchFn: FetchLike,
  url: string,
  signal?: AbortSignal,
  retryDelayMs = 250,
): Promise<ApiResult<Blob>> {
  const response = await fetchWithRetry(fetchFn, url, { signal }, retryDelayMs);
  if (!response.ok) return { ok: false, error: await errorFromResponse(response) };
  return { ok: true, value: await response.blob() };
}

/** POST the expression to /api/analyze and parse the dominance report. */
export async function fetchAnalysis(
  fetchFn: FetchLike,
  baseUrl: string,
  expr: string,
  signal?: AbortSignal,
): Promise<ApiResult<AnalysisReport>> {
  const response = await fetchWithRetry(fetchFn, `${baseUrl}/api/analyze`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify({ expr }),
    signal,
  });
  if (!response.ok) return { ok: false, error: await errorFromResponse(response) };
  return { ok: true, value: (await response.json()) as AnalysisReport };
}

/** List the palettes the service offers. */
export async function fetchPalettes(
  fetchFn: FetchLike,
  baseUrl: string,
): Promise<ApiResult<PaletteInfo[]>> {
  const response = await fetchWithRetry(fetchFn, `${baseUrl}/api/palettes`);
  if (!response.ok) return { ok: false, error: await errorFromResponse(response) };
  return { ok: true, value: (await response.json()) as PaletteInfo[] };
}
