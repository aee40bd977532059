/**
 * Thin REST client for the analysis service. All critique content comes
 * from the server; this module only moves JSON across the wire.
 */

import type {
  AnalyzeRequest,
  AnalyzeResponse,
  ApiErrorBody,
  Health,
} from "./contract.js";

/** The slice of `fetch` the client needs; lets tests pass a stub. */
export type FetchLike = (
  url: string,
  init?: RequestInit,
) => Promise<{ ok: boolean; status: number; json(): Promise<unknown> }>;

/** A non-2xx response whose body carried the API's structured error. */
export class ApiFailure extends Error {
  constructor(
    readonly status: number,
    readonly body: ApiErrorBody,
  ) {
    super(body.error);
    this.name = "ApiFailure";
  }
}

function asErrorBody(status: number, raw: unknown): ApiErrorBody {
  if (
    typeof raw === "object" &&
    raw !== null &&
    typeof (raw as { error?: unknown }).error === "string"
  ) {
    return raw as ApiErrorBody;
  }
  return { error: `service returned HTTP ${status}` };
}

export class ApiClient {
  private readonly fetchFn: FetchLike;

  constructor(
    private readonly baseUrl = "",
    fetchFn?: FetchLike,
  ) {
    this.fetchFn = fetchFn ?? ((url, init) => fetch(url, init));
  }

  async health(): Promise<Health> {
    const res = await this.fetchFn(`${this.baseUrl}/healthz`);
    if (!res.ok) {
      throw new ApiFailure(res.status, asErrorBody(res.status, await safeJson(res)));
    }
    return (await res.json()) as Health;
  }

  async rules(): Promise<unknown> {
    const res = await this.fetchFn(`${this.baseUrl}/api/rules`);
    if (!res.ok) {
      throw new ApiFailure(res.status, asErrorBody(res.status, await safeJson(res)));
    }
    return res.json();
  }

  async analyze(request: AnalyzeRequest): Promise<AnalyzeResponse> {
    const res = await this.fetchFn(`${this.baseUrl}/api/analyze`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(request),
    });
    const raw = await safeJson(res);
    if (!res.ok) {
      throw new ApiFailure(res.status, asErrorBody(res.status, raw));
    }
    return raw as AnalyzeResponse;
  }
}

async function safeJson(res: {
  json(): Promise<unknown>;
}): Promise<unknown> {
  try {
    return await res.json();
  } catch {
    return null;
  }
}
