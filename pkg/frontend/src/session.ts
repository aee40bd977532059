/**
 * Per-tab analysis session: the current input, the last response, and an
 * append-only history of (input, response) exchanges. Clearing resets
 * everything to the empty state.
 */

import type { AnalyzeResponse, Mode } from "./contract.js";

export interface SessionInput {
  mode: Mode;
  payload: string;
  fileName?: string;
}

export interface Exchange {
  input: SessionInput;
  response: AnalyzeResponse;
}

export class UISession {
  #current: SessionInput | null = null;
  #last: AnalyzeResponse | null = null;
  #history: Exchange[] = [];

  get current(): SessionInput | null {
    return this.#current;
  }

  get lastResponse(): AnalyzeResponse | null {
    return this.#last;
  }

  /** Snapshot of all exchanges so far, oldest first. */
  get history(): readonly Exchange[] {
    return Object.freeze([...this.#history]);
  }

  setInput(input: SessionInput): void {
    this.#current = input;
  }

  record(input: SessionInput, response: AnalyzeResponse): void {
    this.#history.push({ input, response });
    this.#current = input;
    this.#last = response;
  }

  clear(): void {
    this.#current = null;
    this.#last = null;
    this.#history = [];
  }
}
