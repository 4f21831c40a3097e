/** Row assignment: spans sharing any surface column stack vertically. */

import type { CandidateSpan } from "./types.js";

export function assignRows(spans: CandidateSpan[]): number[] {
  const rows: number[] = new Array(spans.length).fill(0);
  const rowEnds: CandidateSpan[][] = [];
  const order = spans
    .map((c, i) => ({ c, i }))
    .sort((a, b) => a.c.head - b.c.head || a.c.tail - b.c.tail);
  for (const { c, i } of order) {
    let placed = false;
    for (let r = 0; r < rowEnds.length; r++) {
      const collides = rowEnds[r]!.some(
        (other) => c.head <= other.tail && other.head <= c.tail,
      );
      if (!collides) {
        rowEnds[r]!.push(c);
        rows[i] = r;
        placed = true;
        break;
      }
    }
    if (!placed) {
      rowEnds.push([c]);
      rows[i] = rowEnds.length - 1;
    }
  }
  return rows;
}
