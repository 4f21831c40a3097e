import { describe, expect, it } from "vitest";

import {
  canFollow,
  enumerateTilings,
  isCompleteTiling,
} from "../src/junction.js";
import type { CandidateSpan } from "../src/types.js";

const span = (word: string, head: number, tail: number): CandidateSpan => ({
  word,
  head,
  tail,
});

describe("canFollow", () => {
  it("accepts adjacency", () => {
    expect(canFollow(span("ab", 0, 1), span("cd", 2, 3))).toBe(true);
  });

  it("accepts a shared fused character", () => {
    expect(canFollow(span("vā", 25, 26), span("ambike", 26, 31))).toBe(true);
  });

  it("rejects gaps and regressions", () => {
    expect(canFollow(span("ab", 0, 1), span("d", 3, 3))).toBe(false);
    expect(canFollow(span("abc", 0, 2), span("bc", 1, 2))).toBe(false);
  });

  it("rejects overlap when the left word is a single character", () => {
    expect(canFollow(span("a", 0, 0), span("ab", 0, 1))).toBe(false);
  });

  it("rejects overlap that does not advance coverage", () => {
    expect(canFollow(span("ab", 0, 1), span("b", 1, 1))).toBe(false);
  });
});

describe("enumerateTilings", () => {
  const chunk = { start: 0, end: 1 };

  it("finds both tilings of a two-character chunk", () => {
    const cands = [span("ab", 0, 1), span("a", 0, 0), span("b", 1, 1)];
    const got = enumerateTilings(chunk, cands).map((t) =>
      t.map((i) => cands[i]!.word).join(" "),
    );
    expect(got.sort()).toEqual(["a b", "ab"]);
  });

  it("handles the fused-overlap path", () => {
    const cands = [span("vā", 0, 1), span("ambike", 1, 6)];
    const got = enumerateTilings({ start: 0, end: 6 }, cands);
    expect(got).toEqual([[0, 1]]);
  });

  it("is deterministic", () => {
    const cands = [span("ab", 0, 1), span("a", 0, 0), span("b", 1, 1)];
    const a = enumerateTilings(chunk, cands);
    const b = enumerateTilings(chunk, cands);
    expect(a).toEqual(b);
  });

  it("respects the cap", () => {
    const cands: CandidateSpan[] = [];
    for (let h = 0; h < 8; h++) {
      for (let t = h; t < Math.min(8, h + 3); t++) {
        cands.push(span(`w${h}${t}`, h, t));
      }
    }
    const capped = enumerateTilings({ start: 0, end: 7 }, cands, 5);
    expect(capped.length).toBe(5);
  });
});

describe("isCompleteTiling", () => {
  const chunk = { start: 0, end: 3 };

  it("accepts chains and rejects holes", () => {
    expect(isCompleteTiling(chunk, [span("ab", 0, 1), span("cd", 2, 3)])).toBe(true);
    expect(isCompleteTiling(chunk, [span("abcd", 0, 3)])).toBe(true);
    expect(isCompleteTiling(chunk, [span("ab", 0, 1)])).toBe(false);
    expect(isCompleteTiling(chunk, [])).toBe(false);
  });

  it("accepts the shared-character junction", () => {
    expect(isCompleteTiling(chunk, [span("ab", 0, 1), span("bcd", 1, 3)])).toBe(true);
  });
});
