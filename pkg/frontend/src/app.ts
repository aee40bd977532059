/**
 * Wires the two-pane page together: the left pane holds the input
 * (editor or image preview), the right pane shows whatever the service
 * said about it. One analysis may be in flight at a time; the submit
 * control stays disabled while waiting and whenever the service is
 * unreachable.
 */

import { ApiClient, ApiFailure } from "./api.js";
import type { AnalyzeRequest, Mode } from "./contract.js";
import { UISession } from "./session.js";
import {
  AnalysisPane,
  queryPane,
  renderAnalysis,
  renderBackendChip,
  renderCleared,
  renderError,
  renderPending,
} from "./view.js";

export const MAX_IMAGE_BYTES = 5 * 1024 * 1024;

interface ImagePayload {
  base64: string;
  fileName: string;
}

function mustFind<T extends Element>(root: ParentNode, id: string): T {
  const el = root.querySelector(`#${id}`);
  if (el === null) {
    throw new Error(`page is missing #${id}`);
  }
  return el as T;
}

export class App {
  readonly session: UISession;
  private pane!: AnalysisPane;
  private banner!: HTMLElement;
  private backendChip!: HTMLElement;
  private modeSelect!: HTMLSelectElement;
  private editor!: HTMLTextAreaElement;
  private imageBox!: HTMLElement;
  private fileInput!: HTMLInputElement;
  private preview!: HTMLImageElement;
  private fileNameLabel!: HTMLElement;
  private submitButton!: HTMLButtonElement;
  private clearButton!: HTMLButtonElement;

  private pending = false;
  private healthy = false;
  private image: ImagePayload | null = null;

  constructor(
    private readonly doc: Document,
    private readonly client: ApiClient,
    session?: UISession,
  ) {
    this.session = session ?? new UISession();
  }

  /** Bind the page and run the initial connectivity check. */
  async mount(): Promise<void> {
    const root = this.doc;
    this.pane = queryPane(root);
    this.banner = mustFind(root, "banner");
    this.backendChip = mustFind(root, "backend-chip");
    this.modeSelect = mustFind(root, "mode");
    this.editor = mustFind(root, "editor");
    this.imageBox = mustFind(root, "image-box");
    this.fileInput = mustFind(root, "file-input");
    this.preview = mustFind(root, "preview");
    this.fileNameLabel = mustFind(root, "file-name");
    this.submitButton = mustFind(root, "submit");
    this.clearButton = mustFind(root, "clear");

    this.modeSelect.addEventListener("change", () => this.syncMode());
    this.fileInput.addEventListener("change", () => {
      const file = this.fileInput.files?.[0];
      if (file !== undefined) {
        void this.handleFile(file);
      }
    });
    this.submitButton.addEventListener("click", () => void this.submit());
    this.clearButton.addEventListener("click", () => this.clear());
    this.pane.applyFix.addEventListener("click", () => this.applyFix());
    mustFind<HTMLButtonElement>(root, "banner-retry").addEventListener(
      "click",
      () => void this.checkHealth(),
    );

    this.syncMode();
    renderCleared(this.pane);
    await this.checkHealth();
  }

  get mode(): Mode {
    return this.modeSelect.value as Mode;
  }

  setMode(mode: Mode): void {
    this.modeSelect.value = mode;
    this.syncMode();
  }

  private syncMode(): void {
    const imageMode = this.mode === "image";
    this.editor.classList.toggle("hidden", imageMode);
    this.imageBox.classList.toggle("hidden", !imageMode);
    this.preview.classList.toggle("hidden", !imageMode || this.image === null);
  }

  async checkHealth(): Promise<void> {
    try {
      const health = await this.client.health();
      this.healthy = health.status === "ok";
      renderBackendChip(this.backendChip, health);
    } catch {
      this.healthy = false;
      this.backendChip.textContent = "";
    }
    this.banner.classList.toggle("hidden", this.healthy);
    this.refreshSubmitState();
  }

  private refreshSubmitState(): void {
    this.submitButton.disabled = this.pending || !this.healthy;
  }

  /** Load an uploaded PNG/SVG (≤ 5 MB) as the image payload. */
  async handleFile(file: File): Promise<void> {
    if (file.size > MAX_IMAGE_BYTES) {
      this.pane.status.textContent =
        "that image is larger than the 5 MB upload limit";
      return;
    }
    const dataUrl = await readAsDataUrl(file);
    const base64 = dataUrl.slice(dataUrl.indexOf(",") + 1);
    this.setImage(file.name, base64, dataUrl);
  }

  /** Install an image payload directly (also used by tests). */
  setImage(fileName: string, base64: string, previewUrl?: string): void {
    this.image = { base64, fileName };
    this.fileNameLabel.textContent = fileName;
    if (previewUrl !== undefined) {
      this.preview.src = previewUrl;
    }
    this.syncMode();
  }

  /** Send the current input to the service and render the verdict. */
  async submit(): Promise<void> {
    if (this.pending || !this.healthy) {
      return;
    }
    const mode = this.mode;
    const payload = mode === "image" ? this.image?.base64 : this.editor.value;
    if (payload === undefined || payload.trim() === "") {
      this.pane.status.textContent = "nothing to analyze yet";
      return;
    }

    const request: AnalyzeRequest = { mode, payload };
    if (mode === "image" && this.image !== null) {
      request.item_id = stemOf(this.image.fileName);
    }
    if (mode !== "spec") {
      request.include_transcript = true;
    }

    this.pending = true;
    this.refreshSubmitState();
    renderPending(this.pane);
    try {
      const response = await this.client.analyze(request);
      this.session.record(
        {
          mode,
          payload,
          ...(this.image !== null && mode === "image"
            ? { fileName: this.image.fileName }
            : {}),
        },
        response,
      );
      renderAnalysis(this.pane, response);
    } catch (err) {
      if (err instanceof ApiFailure) {
        renderError(this.pane, err.status, err.body);
      } else {
        this.healthy = false;
        this.banner.classList.remove("hidden");
        renderError(this.pane, 0, {
          error: "the analysis service could not be reached",
        });
      }
    } finally {
      this.pending = false;
      this.refreshSubmitState();
    }
  }

  /** Load the corrected output into the editor for the resubmit loop. */
  applyFix(): void {
    const corrected = this.session.lastResponse?.corrected_spec;
    if (corrected === undefined) {
      return;
    }
    this.editor.value = corrected;
    this.session.setInput({ mode: this.mode, payload: corrected });
    this.pane.status.textContent =
      "corrected version loaded — submit to re-check";
  }

  /** Reset both panes and the session to the empty state. */
  clear(): void {
    this.editor.value = "";
    this.image = null;
    this.fileInput.value = "";
    this.preview.removeAttribute("src");
    this.fileNameLabel.textContent = "";
    this.session.clear();
    renderCleared(this.pane);
    this.syncMode();
  }
}

function stemOf(fileName: string): string {
  const dot = fileName.lastIndexOf(".");
  return dot > 0 ? fileName.slice(0, dot) : fileName;
}

function readAsDataUrl(file: File): Promise<string> {
  return new Promise((resolve, reject) => {
    const reader = new FileReader();
    reader.onload = () => resolve(String(reader.result));
    reader.onerror = () => reject(reader.error);
    reader.readAsDataURL(file);
  });
}
