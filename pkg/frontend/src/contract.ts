/**
 * Wire types for the chart analysis HTTP API, mirroring docs/api.md.
 *
 * The field-name arrays exist so tests can hold the UI to the contract:
 * every field the API defines is rendered, and nothing else is read.
 */

export type Mode = "spec" | "code" | "image";

export interface IssueReport {
  error_type: string;
  rule_id: string;
  severity: string;
  message: string;
  evidence: Record<string, unknown>;
  fix_description?: string;
}

export interface TranscriptEntry {
  stage: string;
  prompt: string;
  response: string;
  latency_s: number;
  fingerprint: string;
}

export interface AnalyzeResponse {
  mode: Mode;
  chart_type: string;
  predicted_count: number;
  issues: IssueReport[];
  warnings: string[];
  corrected_spec?: string;
  transcript?: TranscriptEntry[];
}

export interface AnalyzeRequest {
  mode: Mode;
  payload: string;
  item_id?: string;
  include_transcript?: boolean;
  with_correction?: boolean;
}

export interface ApiErrorBody {
  error: string;
  details?: string[];
}

export interface Health {
  status: string;
  backend: string;
}

export const ANALYZE_RESPONSE_FIELDS = [
  "mode",
  "chart_type",
  "predicted_count",
  "issues",
  "warnings",
  "corrected_spec",
  "transcript",
] as const;

export const ISSUE_FIELDS = [
  "error_type",
  "rule_id",
  "severity",
  "message",
  "evidence",
  "fix_description",
] as const;

export const TRANSCRIPT_FIELDS = [
  "stage",
  "prompt",
  "response",
  "latency_s",
  "fingerprint",
] as const;

export const ANALYZE_REQUEST_FIELDS = [
  "mode",
  "payload",
  "item_id",
  "include_transcript",
  "with_correction",
] as const;

export const ERROR_FIELDS = ["error", "details"] as const;

export const HEALTH_FIELDS = ["status", "backend"] as const;
