/** DOM rendering and event wiring.
 *
 * Candidates are laid out on a per-chunk character grid, spanning the
 * columns of their surface positions; overlapping spans land on
 * separate rows.  Recommended candidates carry the `recommended`
 * highlight class, selections `selected`, unclickable ones `disabled`.
 */

import type { ApiClient } from "./api.js";
import { AnnotationState } from "./state.js";
import { assignRows } from "./layout.js";
import { isSegmentResponse } from "./types.js";

export interface ControllerOptions {
  /** Receives the exported text after a successful upload. */
  onExported?: (text: string) => void;
}

export class AnnotatorController {
  state: AnnotationState | null = null;
  annotationId: string | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
    private readonly options: ControllerOptions = {},
  ) {
    this.root.innerHTML = `
      <div class="error-banner" id="error-banner" hidden></div>
      <form id="segment-form">
        <input id="text-input" type="text" placeholder="surface text" />
        <button id="segment-btn" type="submit">Segment</button>
      </form>
      <div id="lattice"></div>
      <div class="toolbar">
        <button id="export-btn" disabled>Export</button>
        <span id="export-status"></span>
      </div>
      <pre id="export-result" hidden></pre>
    `;
    this.query("#segment-form").addEventListener("submit", (ev) => {
      ev.preventDefault();
      const input = this.query<HTMLInputElement>("#text-input");
      void this.segment(input.value);
    });
    this.query("#export-btn").addEventListener("click", () => {
      void this.export();
    });
  }

  query<T extends HTMLElement = HTMLElement>(selector: string): T {
    const el = this.root.querySelector(selector);
    if (!el) throw new Error(`missing element ${selector}`);
    return el as T;
  }

  showError(message: string): void {
    const banner = this.query("#error-banner");
    banner.textContent = message;
    banner.hidden = false;
  }

  async segment(text: string): Promise<void> {
    this.query("#error-banner").hidden = true;
    try {
      const response = await this.api.segment(text);
      this.load(response);
    } catch (err) {
      this.showError(`segmentation failed: ${(err as Error).message}`);
    }
  }

  /** Accepts a raw payload so tests and pages can inject responses. */
  load(response: unknown): void {
    if (!isSegmentResponse(response)) {
      this.showError("segmentation response does not match the expected schema");
      return;
    }
    this.state = new AnnotationState(response);
    this.annotationId = null;
    this.renderLattice();
  }

  renderLattice(): void {
    const state = this.state;
    const container = this.query("#lattice");
    container.innerHTML = "";
    if (!state) return;

    state.chunks.forEach((view, chunkIndex) => {
      const payload = view.payload;
      const enabled = state.enabled(chunkIndex);
      const complete = state.chunkComplete(chunkIndex);

      const box = document.createElement("div");
      box.className = "chunk";
      box.dataset.chunk = String(chunkIndex);

      const header = document.createElement("div");
      header.className = "chunk-header";
      const title = document.createElement("span");
      title.className = "chunk-text";
      title.textContent = payload.chunk;
      header.appendChild(title);
      const status = document.createElement("span");
      status.className = `chunk-status ${complete ? "complete" : "incomplete"}`;
      status.textContent = complete ? "complete" : "incomplete";
      header.appendChild(status);
      const accept = document.createElement("button");
      accept.className = "accept-rec";
      accept.type = "button";
      accept.textContent = "accept recommendation";
      accept.disabled = view.recommended.size === 0;
      accept.addEventListener("click", () => {
        if (state.acceptRecommendation(chunkIndex)) this.renderLattice();
      });
      header.appendChild(accept);
      box.appendChild(header);

      const width = payload.end - payload.start + 1;
      const grid = document.createElement("div");
      grid.className = "chunk-grid";
      grid.style.gridTemplateColumns = `repeat(${width}, minmax(1.4em, auto))`;

      for (let k = 0; k < payload.chunk.length; k++) {
        const cell = document.createElement("span");
        cell.className = "char-cell";
        cell.textContent = payload.chunk[k] ?? "";
        cell.style.gridColumn = `${k + 1}`;
        cell.style.gridRow = "1";
        grid.appendChild(cell);
      }

      const rows = assignRows(payload.candidates);
      payload.candidates.forEach((cand, candIndex) => {
        const el = document.createElement("button");
        el.type = "button";
        el.classList.add("candidate");
        if (view.recommended.has(candIndex)) el.classList.add("recommended");
        if (view.selected.has(candIndex)) el.classList.add("selected");
        const clickable =
          view.selected.has(candIndex) || enabled.has(candIndex);
        if (!clickable) el.classList.add("disabled");
        el.disabled = !clickable;
        el.dataset.chunk = String(chunkIndex);
        el.dataset.cand = String(candIndex);
        el.textContent = cand.word;
        const col = cand.head - payload.start + 1;
        el.style.gridColumn = `${col} / span ${cand.tail - cand.head + 1}`;
        el.style.gridRow = String((rows[candIndex] ?? 0) + 2);
        el.addEventListener("click", () => {
          if (state.toggle(chunkIndex, candIndex)) this.renderLattice();
        });
        grid.appendChild(el);
      });

      box.appendChild(grid);
      container.appendChild(box);
    });

    const exportBtn = this.query<HTMLButtonElement>("#export-btn");
    exportBtn.disabled = !state.complete();
  }

  /** Upload the finished annotation, then show the server's export. */
  async export(): Promise<string | null> {
    const state = this.state;
    if (!state || !state.complete()) return null;
    const statusEl = this.query("#export-status");
    try {
      const selections = state.selections();
      if (this.annotationId === null) {
        const created = await this.api.createAnnotation(state.input, selections);
        this.annotationId = created.id;
      } else {
        await this.api.putAnnotation(this.annotationId, state.input, selections);
      }
      const text = await this.api.exportAnnotation(this.annotationId);
      const result = this.query("#export-result");
      result.textContent = text;
      result.hidden = false;
      statusEl.textContent = `saved as ${this.annotationId}`;
      this.options.onExported?.(text);
      return text;
    } catch (err) {
      this.showError(`export failed: ${(err as Error).message}`);
      return null;
    }
  }
}
