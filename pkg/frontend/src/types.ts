/** Payload types mirrored from the segmentation API. */

export interface CandidateSpan {
  word: string;
  head: number;
  tail: number;
}

export interface ChunkPayload {
  chunk: string;
  start: number;
  end: number;
  candidates: CandidateSpan[];
  prediction: string[];
  prcp_applied: boolean;
}

export interface SegmentResponse {
  input: string;
  chunks: ChunkPayload[];
}

export interface AnnotationSelections {
  input: string;
  selections: CandidateSpan[][];
}

function isCandidate(v: unknown): v is CandidateSpan {
  if (typeof v !== "object" || v === null) return false;
  const c = v as Record<string, unknown>;
  return (
    typeof c.word === "string" &&
    typeof c.head === "number" &&
    typeof c.tail === "number"
  );
}

function isChunk(v: unknown): v is ChunkPayload {
  if (typeof v !== "object" || v === null) return false;
  const c = v as Record<string, unknown>;
  return (
    typeof c.chunk === "string" &&
    typeof c.start === "number" &&
    typeof c.end === "number" &&
    Array.isArray(c.candidates) &&
    c.candidates.every(isCandidate) &&
    Array.isArray(c.prediction) &&
    c.prediction.every((w) => typeof w === "string")
  );
}

/** Schema guard; render shows an error banner instead of crashing. */
export function isSegmentResponse(v: unknown): v is SegmentResponse {
  if (typeof v !== "object" || v === null) return false;
  const r = v as Record<string, unknown>;
  return (
    typeof r.input === "string" &&
    Array.isArray(r.chunks) &&
    r.chunks.every(isChunk)
  );
}

export function spanKey(c: CandidateSpan): string {
  return `${c.word}@${c.head}-${c.tail}`;
}
