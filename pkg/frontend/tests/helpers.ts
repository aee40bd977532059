import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { FetchLike } from "../src/api.js";
import type { AnalyzeResponse } from "../src/contract.js";

export const TESTS_DIR = dirname(fileURLToPath(import.meta.url));
export const FRONTEND_DIR = join(TESTS_DIR, "..");
export const REPO_ROOT = join(FRONTEND_DIR, "..");

/** Install the real page markup into the test document. */
export function loadPage(doc: Document): void {
  const html = readFileSync(join(FRONTEND_DIR, "index.html"), "utf8");
  const open = html.indexOf("<body>");
  const close = html.indexOf("</body>");
  if (open === -1 || close === -1) {
    throw new Error("index.html has no body element");
  }
  doc.body.innerHTML = html.slice(open + "<body>".length, close);
}

export interface StubResponse {
  status: number;
  body: unknown;
}

export interface RecordedCall {
  url: string;
  init?: RequestInit;
}

export interface FetchStub {
  fetch: FetchLike;
  calls: RecordedCall[];
  /** Replace the response for a path prefix. */
  set(path: string, responder: () => Promise<StubResponse> | StubResponse): void;
}

/** A routing fetch stub: responders are keyed by path prefix. */
export function makeFetchStub(): FetchStub {
  const routes = new Map<string, () => Promise<StubResponse> | StubResponse>();
  const calls: RecordedCall[] = [];
  const fetchFn: FetchLike = async (url, init) => {
    calls.push({ url, ...(init !== undefined ? { init } : {}) });
    for (const [path, responder] of routes) {
      if (url.includes(path)) {
        const res = await responder();
        return {
          ok: res.status >= 200 && res.status < 300,
          status: res.status,
          json: async () => res.body,
        };
      }
    }
    throw new TypeError(`no stub route for ${url}`);
  };
  return {
    fetch: fetchFn,
    calls,
    set(path, responder) {
      routes.set(path, responder);
    },
  };
}

export function analyzeCalls(stub: FetchStub): RecordedCall[] {
  return stub.calls.filter((c) => c.url.includes("/api/analyze"));
}

/** A response exercising every field the API contract defines. */
export function fullResponse(): AnalyzeResponse {
  return {
    mode: "spec",
    chart_type: "bar",
    predicted_count: 2,
    issues: [
      {
        error_type: "non-zero-baseline",
        rule_id: "zero-baseline",
        severity: "error",
        message: "The value axis starts at 40 instead of zero.",
        evidence: { axis: "y", effective_min: 40.0 },
        fix_description: "set the y axis baseline to zero",
      },
      {
        error_type: "dual-axis-issue",
        rule_id: "llm-report",
        severity: "warning",
        message: "model flagged Dual Axis Issue",
        evidence: {},
      },
    ],
    warnings: ["one issue type was not recognized"],
    corrected_spec: '{"schema_version": "vizlint/1"}',
    transcript: [
      {
        stage: "chart_type_detection",
        prompt: "What kind of chart is shown?",
        response: "Bar Plot",
        latency_s: 0.0,
        fingerprint: "item-1",
      },
    ],
  };
}
