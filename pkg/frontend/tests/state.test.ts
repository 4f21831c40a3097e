import { describe, expect, it } from "vitest";

import { AnnotationState } from "../src/state.js";
import type { SegmentResponse } from "../src/types.js";

function vambikeResponse(): SegmentResponse {
  return {
    input: "vāmbike",
    chunks: [
      {
        chunk: "vāmbike",
        start: 0,
        end: 6,
        candidates: [
          { word: "vā", head: 0, tail: 1 },
          { word: "ambike", head: 1, tail: 6 },
          { word: "vāmbike", head: 0, tail: 6 },
        ],
        prediction: ["vā", "ambike"],
        prcp_applied: false,
      },
    ],
  };
}

describe("AnnotationState", () => {
  it("marks the predicted path as recommended", () => {
    const state = new AnnotationState(vambikeResponse());
    expect([...state.chunks[0]!.recommended].sort()).toEqual([0, 1]);
  });

  it("selecting a full-span candidate completes the chunk", () => {
    const state = new AnnotationState(vambikeResponse());
    expect(state.toggle(0, 2)).toBe(true);
    expect(state.chunkComplete(0)).toBe(true);
    expect(state.complete()).toBe(true);
    expect(state.exportText()).toBe("vāmbike");
  });

  it("selection disables incompatible candidates", () => {
    const state = new AnnotationState(vambikeResponse());
    state.toggle(0, 2);
    const enabled = state.enabled(0);
    expect(enabled.size).toBe(0);
    expect(state.toggle(0, 0)).toBe(false); // disabled: no-op
  });

  it("toggle is an involution on the enable set", () => {
    const state = new AnnotationState(vambikeResponse());
    const before = [...state.enabled(0)].sort();
    state.toggle(0, 2);
    state.toggle(0, 2); // deselect
    expect([...state.enabled(0)].sort()).toEqual(before);
    expect(state.chunkComplete(0)).toBe(false);
  });

  it("accepting the recommendation completes in one step", () => {
    const state = new AnnotationState(vambikeResponse());
    expect(state.acceptRecommendation(0)).toBe(true);
    expect(state.chunkComplete(0)).toBe(true);
    expect(state.exportText()).toBe("vā ambike");
  });

  it("manual selections win over the recommendation", () => {
    const state = new AnnotationState(vambikeResponse());
    state.acceptRecommendation(0);
    state.toggle(0, 0); // drop "vā" again
    expect(state.chunkComplete(0)).toBe(false);
    expect(state.exportText()).toBe("ambike");
  });

  it("out-of-lattice prediction yields no recommendation", () => {
    const response = vambikeResponse();
    response.chunks[0]!.prediction = ["vā", "aambike"];
    const state = new AnnotationState(response);
    expect(state.chunks[0]!.recommended.size).toBe(0);
    expect(state.acceptRecommendation(0)).toBe(false);
  });

  it("export joins chunks in order", () => {
    const response: SegmentResponse = {
      input: "ab cd",
      chunks: [
        {
          chunk: "ab",
          start: 0,
          end: 1,
          candidates: [{ word: "ab", head: 0, tail: 1 }],
          prediction: ["ab"],
          prcp_applied: false,
        },
        {
          chunk: "cd",
          start: 3,
          end: 4,
          candidates: [{ word: "cd", head: 3, tail: 4 }],
          prediction: ["cd"],
          prcp_applied: false,
        },
      ],
    };
    const state = new AnnotationState(response);
    state.acceptRecommendation(0);
    expect(state.complete()).toBe(false); // second chunk still open
    state.acceptRecommendation(1);
    expect(state.complete()).toBe(true);
    expect(state.exportText()).toBe("ab cd");
  });
});
