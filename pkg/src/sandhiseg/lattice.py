"""Candidate lattice over a character sequence.

The lattice holds one node per non-space input character plus candidate
word nodes whose [head, tail] spans live inside a single whitespace
chunk.  Candidate spans may overlap by one character at a fused juncture
(the shared surface character belongs to both words), which is how
sandhi-merged boundaries are represented.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

from .errors import EmptyInput, InvalidConfig, NoPath, UnmappableCandidate

CHAR = "char"
CANDIDATE = "candidate"

# Rectification search half-width around the claimed span.
RECTIFY_WINDOW = 5
# Per-chunk cap on path enumeration.
MAX_PATHS = 10_000
# Separator used inside multi-word node texts (e.g. rule nodes "a_a").
WORD_SEP = "_"


def normalize_text(text: str) -> str:
    """Canonical composition (NFC); all indices refer to this form."""
    return unicodedata.normalize("NFC", text)


@dataclass(frozen=True)
class SpanNode:
    """A lattice node: one input character or one candidate word."""

    text: str
    head: int
    tail: int
    kind: Literal["char", "candidate"] = CANDIDATE

    def __post_init__(self) -> None:
        if self.head > self.tail:
            raise ValueError(f"head {self.head} > tail {self.tail}")
        if self.kind == CHAR and (self.head != self.tail or len(self.text) != 1):
            raise ValueError("char nodes span exactly one character")


@dataclass(frozen=True)
class Chunk:
    """A maximal whitespace-delimited substring of the input."""

    start: int
    end: int
    text: str

    def contains(self, node: SpanNode) -> bool:
        return self.start <= node.head and node.tail <= self.end


@dataclass(frozen=True)
class SandhiRule:
    """Juncture rewrite u|v -> f after left context x."""

    u: str
    v: str
    f: str
    x: str = ""

    def __post_init__(self) -> None:
        if not self.f:
            raise ValueError("rule surface f must be nonempty")
        if not self.u:
            raise ValueError("rule left side u must be nonempty")

    @property
    def split_text(self) -> str:
        """Node text for the underlying split ("u_v", or "u" alone)."""
        return self.u + WORD_SEP + self.v if self.v else self.u


@dataclass(frozen=True)
class Lattice:
    """Immutable per-sentence candidate space."""

    input: str
    chunks: tuple[Chunk, ...]
    char_nodes: tuple[SpanNode, ...]
    candidates: tuple[SpanNode, ...]
    source: Literal["external", "ngram", "rules"] = "ngram"
    n_dropped: int = 0

    def __post_init__(self) -> None:
        expected = build_char_nodes(self.input)
        if list(self.char_nodes) != expected:
            raise ValueError("char_nodes must cover non-space characters in order")
        seen: set[tuple[str, int, int]] = set()
        for node in self.candidates:
            key = (node.text, node.head, node.tail)
            if key in seen:
                raise ValueError(f"duplicate candidate {key}")
            seen.add(key)
            if not any(c.contains(node) for c in self.chunks):
                raise ValueError(f"candidate {key} crosses a chunk boundary")

    @property
    def nodes(self) -> tuple[SpanNode, ...]:
        """Encoder ordering: characters first, then candidates."""
        return self.char_nodes + self.candidates

    def chunk_candidates(self, chunk: Chunk) -> list[SpanNode]:
        return [n for n in self.candidates if chunk.contains(n)]

    def chunk_char_positions(self, chunk: Chunk) -> list[int]:
        """Indices into char_nodes of the chunk's characters."""
        return [
            i for i, n in enumerate(self.char_nodes) if chunk.start <= n.head <= chunk.end
        ]


@dataclass(frozen=True)
class Path:
    """One tiling of a chunk by candidate nodes."""

    words: tuple[SpanNode, ...]
    chunk: Chunk

    @property
    def texts(self) -> tuple[str, ...]:
        return tuple(w.text for w in self.words)

    @property
    def segmentation(self) -> str:
        return " ".join(self.texts)


@dataclass
class PathSet:
    """Enumeration result with a truncation diagnostic."""

    paths: list[Path]
    truncated: bool = False


def split_chunks(text: str) -> list[Chunk]:
    """Maximal non-space runs with surface indices."""
    chunks: list[Chunk] = []
    start = None
    for i, ch in enumerate(text):
        if ch.isspace():
            if start is not None:
                chunks.append(Chunk(start, i - 1, text[start:i]))
                start = None
        elif start is None:
            start = i
    if start is not None:
        chunks.append(Chunk(start, len(text) - 1, text[start:]))
    if not chunks:
        raise EmptyInput("input is empty or whitespace-only")
    return chunks


def build_char_nodes(text: str) -> list[SpanNode]:
    """One node per non-space character, at its raw surface index."""
    if not text.strip():
        raise EmptyInput("input is empty or whitespace-only")
    return [
        SpanNode(ch, i, i, kind=CHAR) for i, ch in enumerate(text) if not ch.isspace()
    ]


def build_ngram_candidates(text: str, n_max: int) -> list[SpanNode]:
    """All within-chunk substrings of length 2..n_max, by (head, tail)."""
    if n_max < 2:
        raise InvalidConfig(f"n_max must be >= 2, got {n_max}")
    out: list[SpanNode] = []
    for chunk in split_chunks(text):
        length = chunk.end - chunk.start + 1
        for head in range(chunk.start, chunk.end + 1):
            for n in range(2, min(n_max, length) + 1):
                tail = head + n - 1
                if tail > chunk.end:
                    break
                out.append(SpanNode(text[head : tail + 1], head, tail))
    out.sort(key=lambda n: (n.head, n.tail))
    return out


def levenshtein(a: str, b: str) -> int:
    """Edit distance over Unicode scalars."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def rectify_mapping(
    text: str,
    word: str,
    claimed_head: int,
    claimed_tail: int,
    window: int = RECTIFY_WINDOW,
) -> tuple[int, int]:
    """Closest within-chunk span for a candidate word.

    Searches spans whose endpoints lie within +/-window of the claimed
    ones and returns the span minimizing edit distance to the word;
    ties prefer the span nearest the claimed one, then the smaller
    head, then the shorter span.  The winning surface text may differ
    from the word (fused boundaries).

    Chunks overlapping the claimed span are searched first, so a
    repeated word in a neighboring chunk cannot steal a claim whose own
    chunk holds an acceptable (if inexact) match.
    """
    if not word:
        raise UnmappableCandidate("empty candidate word")
    chunks = split_chunks(text)

    def search(scope: list[Chunk]) -> tuple[int, int] | None:
        best: tuple[int, int, int, int] | None = None
        best_span: tuple[int, int] | None = None
        for chunk in scope:
            h_lo = max(chunk.start, claimed_head - window)
            h_hi = min(chunk.end, claimed_head + window)
            for head in range(h_lo, h_hi + 1):
                t_lo = max(head, claimed_tail - window)
                t_hi = min(chunk.end, claimed_tail + window)
                for tail in range(t_lo, t_hi + 1):
                    dist = levenshtein(word, text[head : tail + 1])
                    # A span at distance == len(word) shares nothing
                    # with the word; require some actual overlap.
                    if dist >= len(word):
                        continue
                    drift = abs(head - claimed_head) + abs(tail - claimed_tail)
                    key = (dist, drift, head, tail - head + 1)
                    if best is None or key < best:
                        best = key
                        best_span = (head, tail)
        return best_span

    claimed = [c for c in chunks if c.start <= claimed_tail and claimed_head <= c.end]
    if claimed and len(claimed) < len(chunks):
        found = search(claimed)
        if found is not None:
            return found
    found = search(chunks)
    if found is None:
        raise UnmappableCandidate(
            f"no span within window for {word!r} near ({claimed_head}, {claimed_tail})"
        )
    return found


def ingest_candidate_space(
    text: str, records: Iterable[tuple[str, int, int]]
) -> Lattice:
    """Lattice from externally supplied (word, head, tail) records.

    Claimed indices are rectified; unmappable records are dropped and
    counted on the lattice rather than raised.
    """
    text = normalize_text(text)
    chunks = tuple(split_chunks(text))
    seen: set[tuple[str, int, int]] = set()
    nodes: list[SpanNode] = []
    dropped = 0
    for word, head, tail in records:
        word = normalize_text(word)
        try:
            h, t = rectify_mapping(text, word, head, tail)
        except UnmappableCandidate:
            dropped += 1
            continue
        key = (word, h, t)
        if key in seen:
            continue
        seen.add(key)
        nodes.append(SpanNode(word, h, t))
    nodes.sort(key=lambda n: (n.head, n.tail, n.text))
    return Lattice(
        input=text,
        chunks=chunks,
        char_nodes=tuple(build_char_nodes(text)),
        candidates=tuple(nodes),
        source="external",
        n_dropped=dropped,
    )


def ngram_lattice(text: str, n_max: int = 4) -> Lattice:
    """Fallback lattice whose candidates are all short n-grams."""
    text = normalize_text(text)
    return Lattice(
        input=text,
        chunks=tuple(split_chunks(text)),
        char_nodes=tuple(build_char_nodes(text)),
        candidates=tuple(build_ngram_candidates(text, n_max)),
        source="ngram",
    )


def apply_sandhi_rule_nodes(text: str, rules: Sequence[SandhiRule]) -> list[SpanNode]:
    """Auxiliary nodes marking where a rule's surface f could rewrite.

    For each within-chunk occurrence of f preceded by the rule's left
    context, emit a candidate whose text is the underlying split.
    """
    text = normalize_text(text)
    seen: set[tuple[str, int, int]] = set()
    out: list[SpanNode] = []
    for chunk in split_chunks(text):
        for rule in rules:
            f = rule.f
            pos = chunk.start
            while True:
                p = text.find(f, pos, chunk.end + 1)
                if p == -1 or p + len(f) - 1 > chunk.end:
                    break
                pos = p + 1
                if rule.x:
                    if p - len(rule.x) < chunk.start:
                        continue
                    if text[p - len(rule.x) : p] != rule.x:
                        continue
                key = (rule.split_text, p, p + len(f) - 1)
                if key not in seen:
                    seen.add(key)
                    out.append(SpanNode(key[0], key[1], key[2]))
    out.sort(key=lambda n: (n.head, n.tail, n.text))
    return out


def rule_lattice(text: str, rules: Sequence[SandhiRule]) -> Lattice:
    """Lattice whose auxiliary nodes come from sandhi rules."""
    text = normalize_text(text)
    return Lattice(
        input=text,
        chunks=tuple(split_chunks(text)),
        char_nodes=tuple(build_char_nodes(text)),
        candidates=tuple(apply_sandhi_rule_nodes(text, rules)),
        source="rules",
    )


def can_follow(prev: SpanNode, nxt: SpanNode) -> bool:
    """Junction rule: adjacency, or a one-character overlap where the
    fused surface character is shared.  Neither side of an overlap may
    be subsumed by the other, so both words must extend beyond the
    shared character."""
    if nxt.head == prev.tail + 1:
        return True
    return nxt.head == prev.tail and nxt.tail > prev.tail and prev.head < prev.tail


def enumerate_paths(
    lattice: Lattice, chunk: Chunk, max_paths: int = MAX_PATHS
) -> PathSet:
    """All candidate tilings of the chunk, depth-first, deterministic.

    Raises NoPath when nothing tiles the chunk; sets the truncation
    flag when the cap stops the walk early.
    """
    cands = sorted(lattice.chunk_candidates(chunk), key=lambda n: (n.head, n.tail, n.text))
    by_head: dict[int, list[SpanNode]] = {}
    for node in cands:
        by_head.setdefault(node.head, []).append(node)

    result = PathSet(paths=[])
    stack: list[SpanNode] = []

    def extend(prev: SpanNode) -> None:
        if len(result.paths) >= max_paths:
            result.truncated = True
            return
        if prev.tail == chunk.end:
            result.paths.append(Path(tuple(stack), chunk))
            return
        nxt = by_head.get(prev.tail + 1, [])
        overlap = [n for n in by_head.get(prev.tail, []) if can_follow(prev, n)]
        for node in sorted(nxt + overlap, key=lambda n: (n.head, n.tail, n.text)):
            stack.append(node)
            extend(node)
            stack.pop()
            if result.truncated:
                return

    for node in by_head.get(chunk.start, []):
        stack.append(node)
        extend(node)
        stack.pop()
        if result.truncated:
            break

    if not result.paths:
        raise NoPath(f"no candidate path tiles chunk {chunk.text!r}")
    return result
