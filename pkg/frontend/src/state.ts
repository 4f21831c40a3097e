/** Selection state machine over a segmentation response. */

import type { CandidateSpan, ChunkPayload, SegmentResponse } from "./types.js";
import {
  enabledCandidates,
  findRecommendedPath,
  isCompleteTiling,
} from "./junction.js";

export interface ChunkView {
  payload: ChunkPayload;
  recommended: ReadonlySet<number>;
  selected: Set<number>;
}

export class AnnotationState {
  readonly input: string;
  readonly chunks: ChunkView[];

  constructor(response: SegmentResponse) {
    this.input = response.input;
    this.chunks = response.chunks.map((payload) => {
      const rec = findRecommendedPath(payload, payload.candidates, payload.prediction);
      return {
        payload,
        recommended: new Set(rec ?? []),
        selected: new Set<number>(),
      };
    });
  }

  /** Unselected candidates still extendable to a complete tiling. */
  enabled(chunkIndex: number): Set<number> {
    const view = this.chunks[chunkIndex]!;
    return enabledCandidates(view.payload, view.payload.candidates, view.selected);
  }

  /** Selected candidates toggle off; unselected ones toggle on only
   * when enabled.  Returns whether anything changed. */
  toggle(chunkIndex: number, candidateIndex: number): boolean {
    const view = this.chunks[chunkIndex]!;
    if (view.selected.has(candidateIndex)) {
      view.selected.delete(candidateIndex);
      return true;
    }
    if (!this.enabled(chunkIndex).has(candidateIndex)) return false;
    view.selected.add(candidateIndex);
    return true;
  }

  /** One-click adoption of the model's path; false when the prediction
   * is not a valid path of this lattice. */
  acceptRecommendation(chunkIndex: number): boolean {
    const view = this.chunks[chunkIndex]!;
    if (view.recommended.size === 0) return false;
    view.selected = new Set(view.recommended);
    return true;
  }

  chunkComplete(chunkIndex: number): boolean {
    const view = this.chunks[chunkIndex]!;
    const spans = [...view.selected].map((i) => view.payload.candidates[i]!);
    return isCompleteTiling(view.payload, spans);
  }

  complete(): boolean {
    return this.chunks.every((_, i) => this.chunkComplete(i));
  }

  selections(): CandidateSpan[][] {
    return this.chunks.map((view) =>
      [...view.selected]
        .map((i) => view.payload.candidates[i]!)
        .sort((a, b) => a.head - b.head || a.tail - b.tail),
    );
  }

  /** Selections joined per chunk, chunks joined by single spaces. */
  exportText(): string {
    return this.selections()
      .map((spans) => spans.map((s) => s.word).join(" "))
      .filter((part) => part.length > 0)
      .join(" ");
  }
}
