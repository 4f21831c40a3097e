/** Span geometry shared with the engine: junction rule and tilings.
 *
 * A path through a chunk is a sequence of candidate spans where each
 * successor either starts right after its predecessor or shares exactly
 * the predecessor's final character (a fused juncture); neither side of
 * an overlap may be swallowed by the other.  All linguistic content
 * (which spans exist, what the model recommends) comes from the API;
 * this module only reasons about index arithmetic.
 */

import type { CandidateSpan } from "./types.js";
import { spanKey } from "./types.js";

export interface ChunkExtent {
  start: number;
  end: number;
}

export const MAX_TILINGS = 10000;

export function canFollow(prev: CandidateSpan, next: CandidateSpan): boolean {
  if (next.head === prev.tail + 1) return true;
  return (
    next.head === prev.tail && next.tail > prev.tail && prev.head < prev.tail
  );
}

function byPosition(a: CandidateSpan, b: CandidateSpan): number {
  return a.head - b.head || a.tail - b.tail || (a.word < b.word ? -1 : a.word > b.word ? 1 : 0);
}

/** All complete tilings as arrays of candidate indices, depth-first,
 * in the same deterministic order the engine uses. */
export function enumerateTilings(
  chunk: ChunkExtent,
  candidates: CandidateSpan[],
  maxTilings: number = MAX_TILINGS,
): number[][] {
  const order = candidates
    .map((c, i) => ({ c, i }))
    .sort((x, y) => byPosition(x.c, y.c));
  const results: number[][] = [];
  const stack: number[] = [];

  const walk = (prev: CandidateSpan): void => {
    if (results.length >= maxTilings) return;
    if (prev.tail === chunk.end) {
      results.push([...stack]);
      return;
    }
    for (const { c, i } of order) {
      if (canFollow(prev, c)) {
        stack.push(i);
        walk(c);
        stack.pop();
        if (results.length >= maxTilings) return;
      }
    }
  };

  for (const { c, i } of order) {
    if (c.head === chunk.start) {
      stack.push(i);
      walk(c);
      stack.pop();
      if (results.length >= maxTilings) break;
    }
  }
  return results;
}

/** Whether the spans, sorted, form one chain covering the chunk. */
export function isCompleteTiling(
  chunk: ChunkExtent,
  spans: CandidateSpan[],
): boolean {
  if (spans.length === 0) return false;
  const sorted = [...spans].sort(byPosition);
  const first = sorted[0]!;
  const last = sorted[sorted.length - 1]!;
  if (first.head !== chunk.start || last.tail !== chunk.end) return false;
  for (let k = 1; k < sorted.length; k++) {
    if (!canFollow(sorted[k - 1]!, sorted[k]!)) return false;
  }
  return true;
}

/** Indices of unselected candidates that can still appear in some
 * complete tiling containing every current selection. */
export function enabledCandidates(
  chunk: ChunkExtent,
  candidates: CandidateSpan[],
  selected: ReadonlySet<number>,
): Set<number> {
  const tilings = enumerateTilings(chunk, candidates);
  const enabled = new Set<number>();
  for (const tiling of tilings) {
    const members = new Set(tiling);
    let containsAll = true;
    for (const s of selected) {
      if (!members.has(s)) {
        containsAll = false;
        break;
      }
    }
    if (!containsAll) continue;
    for (const i of tiling) {
      if (!selected.has(i)) enabled.add(i);
    }
  }
  return enabled;
}

/** The candidate indices spelling out the predicted word sequence, or
 * null when the prediction is not a lattice path (e.g. kept verbatim
 * after a failed rectification). */
export function findRecommendedPath(
  chunk: ChunkExtent,
  candidates: CandidateSpan[],
  prediction: string[],
): number[] | null {
  const want = prediction.join(" ");
  for (const tiling of enumerateTilings(chunk, candidates)) {
    const text = tiling.map((i) => candidates[i]!.word).join(" ");
    if (text === want) return tiling;
  }
  return null;
}

export function dedupeKey(c: CandidateSpan): string {
  return spanKey(c);
}
