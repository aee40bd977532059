/**
 * Pure DOM renderers for the analysis pane. Every function takes the
 * elements it writes to; none reads global state or talks to the
 * network, so each is unit-testable with a bare document.
 */

import type {
  AnalyzeResponse,
  ApiErrorBody,
  Health,
  IssueReport,
  TranscriptEntry,
} from "./contract.js";

export interface AnalysisPane {
  status: HTMLElement;
  meta: HTMLElement;
  errorBox: HTMLElement;
  issues: HTMLElement;
  warningsWrap: HTMLElement;
  warnings: HTMLElement;
  correctedWrap: HTMLElement;
  corrected: HTMLElement;
  applyFix: HTMLButtonElement;
  transcriptWrap: HTMLElement;
  transcript: HTMLElement;
}

const PANE_IDS: Record<keyof AnalysisPane, string> = {
  status: "status",
  meta: "meta",
  errorBox: "error-box",
  issues: "issues",
  warningsWrap: "warnings-wrap",
  warnings: "warnings",
  correctedWrap: "corrected-wrap",
  corrected: "corrected",
  applyFix: "apply-fix",
  transcriptWrap: "transcript-wrap",
  transcript: "transcript",
};

/** Collect the analysis-pane elements, failing fast on a broken page. */
export function queryPane(root: ParentNode): AnalysisPane {
  const pane: Partial<Record<keyof AnalysisPane, Element>> = {};
  for (const key of Object.keys(PANE_IDS) as (keyof AnalysisPane)[]) {
    const el = root.querySelector(`#${PANE_IDS[key]}`);
    if (el === null) {
      throw new Error(`analysis pane is missing #${PANE_IDS[key]}`);
    }
    pane[key] = el;
  }
  return pane as unknown as AnalysisPane;
}

function hide(el: HTMLElement): void {
  el.classList.add("hidden");
}

function show(el: HTMLElement): void {
  el.classList.remove("hidden");
}

function resetPane(pane: AnalysisPane): void {
  pane.meta.textContent = "";
  pane.errorBox.textContent = "";
  hide(pane.errorBox);
  pane.issues.replaceChildren();
  pane.warnings.replaceChildren();
  hide(pane.warningsWrap);
  pane.corrected.textContent = "";
  hide(pane.correctedWrap);
  pane.applyFix.disabled = true;
  pane.transcript.replaceChildren();
  hide(pane.transcriptWrap);
}

export function renderCleared(pane: AnalysisPane): void {
  resetPane(pane);
  pane.status.textContent = "submit a chart to see its analysis";
}

export function renderPending(pane: AnalysisPane): void {
  resetPane(pane);
  pane.status.textContent = "analyzing…";
}

export function renderError(
  pane: AnalysisPane,
  status: number,
  body: ApiErrorBody,
): void {
  resetPane(pane);
  pane.status.textContent = `request failed (HTTP ${status})`;
  const doc = pane.errorBox.ownerDocument;
  const message = doc.createElement("p");
  message.className = "error-message";
  message.textContent = body.error;
  pane.errorBox.replaceChildren(message);
  if (body.details !== undefined && body.details.length > 0) {
    const list = doc.createElement("ul");
    for (const detail of body.details) {
      const li = doc.createElement("li");
      li.textContent = detail;
      list.append(li);
    }
    pane.errorBox.append(list);
  }
  show(pane.errorBox);
}

export function renderAnalysis(
  pane: AnalysisPane,
  res: AnalyzeResponse,
): void {
  resetPane(pane);
  const doc = pane.issues.ownerDocument;

  const n = res.issues.length;
  pane.status.textContent =
    n === 0 ? "no issues found" : `${n} issue${n === 1 ? "" : "s"} found`;
  pane.meta.textContent =
    `mode ${res.mode} · chart type ${res.chart_type}` +
    ` · predicted issue count ${res.predicted_count}`;

  for (const issue of res.issues) {
    pane.issues.append(renderIssue(doc, issue));
  }

  if (res.warnings.length > 0) {
    for (const warning of res.warnings) {
      const li = doc.createElement("li");
      li.textContent = warning;
      pane.warnings.append(li);
    }
    show(pane.warningsWrap);
  }

  if (res.corrected_spec !== undefined) {
    pane.corrected.textContent = res.corrected_spec;
    pane.applyFix.disabled = false;
    show(pane.correctedWrap);
  }

  if (res.transcript !== undefined && res.transcript.length > 0) {
    for (const entry of res.transcript) {
      pane.transcript.append(renderTranscriptEntry(doc, entry));
    }
    show(pane.transcriptWrap);
  }
}

function renderIssue(doc: Document, issue: IssueReport): HTMLLIElement {
  const li = doc.createElement("li");
  li.className = "issue";
  li.dataset.errorType = issue.error_type;

  const head = doc.createElement("div");
  head.className = "issue-head";
  const type = doc.createElement("span");
  type.className = "issue-type";
  type.textContent = issue.error_type;
  const severity = doc.createElement("span");
  severity.className = `issue-severity sev-${issue.severity}`;
  severity.textContent = issue.severity;
  const rule = doc.createElement("span");
  rule.className = "issue-rule";
  rule.textContent = issue.rule_id;
  head.append(type, severity, rule);
  li.append(head);

  const message = doc.createElement("p");
  message.className = "issue-message";
  message.textContent = issue.message;
  li.append(message);

  if (issue.fix_description !== undefined) {
    const suggestion = doc.createElement("p");
    suggestion.className = "issue-suggestion";
    suggestion.textContent = `Suggestion: ${issue.fix_description}`;
    li.append(suggestion);
  }

  const evidence = Object.entries(issue.evidence);
  if (evidence.length > 0) {
    const dl = doc.createElement("dl");
    dl.className = "issue-evidence";
    for (const [key, value] of evidence) {
      const dt = doc.createElement("dt");
      dt.textContent = key;
      const dd = doc.createElement("dd");
      dd.textContent = String(value);
      dl.append(dt, dd);
    }
    li.append(dl);
  }
  return li;
}

function renderTranscriptEntry(
  doc: Document,
  entry: TranscriptEntry,
): HTMLLIElement {
  const li = doc.createElement("li");
  li.className = "transcript-entry";

  const head = doc.createElement("div");
  head.className = "transcript-head";
  head.textContent =
    `${entry.stage} · ${entry.fingerprint} · ${entry.latency_s}s`;
  li.append(head);

  const prompt = doc.createElement("pre");
  prompt.className = "transcript-prompt";
  prompt.textContent = entry.prompt;
  const response = doc.createElement("pre");
  response.className = "transcript-response";
  response.textContent = entry.response;
  li.append(prompt, response);
  return li;
}

/** Show which backend the service reports itself healthy with. */
export function renderBackendChip(chip: HTMLElement, health: Health): void {
  chip.textContent = `${health.status} · backend ${health.backend}`;
}
