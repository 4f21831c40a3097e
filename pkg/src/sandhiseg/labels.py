"""Gold alignment between surface chunks and segmented text.

Training targets are per-character output strings: each surface
character is labeled with the gold substring it produces, with '_'
standing for a word boundary.  A fused character therefore carries the
whole juncture (surface "ā" from "a a" gets the label "a_a"), while
unchanged characters label as themselves.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import AlignmentMismatch, AlignmentOverflow, UnknownLabel
from .lattice import Chunk, split_chunks

MAX_LABEL_LEN = 3
UNK_LABEL = "<unk>"
BOUNDARY = "_"


def align_gold_labels(chunk_surface: str, gold_split: str) -> list[str]:
    """Per-character labels for one chunk.

    Monotonic minimum-edit alignment of the surface against the gold
    form (spaces rendered as '_').  Inserted gold characters attach to
    the preceding surface character, so juncture material lands on the
    fused character.  Labels longer than MAX_LABEL_LEN raise
    AlignmentOverflow.
    """
    gold = gold_split.replace(" ", BOUNDARY)
    m, n = len(chunk_surface), len(gold)
    dp = [[0] * (n + 1) for _ in range(m + 1)]
    for i in range(1, m + 1):
        dp[i][0] = i
    for j in range(1, n + 1):
        dp[0][j] = j
    for i in range(1, m + 1):
        si = chunk_surface[i - 1]
        row, prev = dp[i], dp[i - 1]
        for j in range(1, n + 1):
            row[j] = min(
                prev[j - 1] + (si != gold[j - 1]),
                row[j - 1] + 1,
                prev[j] + 1,
            )

    # Backtrace preference: exact match, then gold insertion (attaches
    # left), then substitution, then surface deletion.  The insertion
    # bias is what pulls "u_v" onto the fused surface character.
    ops: list[tuple[str, int, int]] = []
    i, j = m, n
    while i > 0 or j > 0:
        if i > 0 and j > 0 and chunk_surface[i - 1] == gold[j - 1] and dp[i][j] == dp[i - 1][j - 1]:
            ops.append(("take", i - 1, j - 1))
            i, j = i - 1, j - 1
        elif j > 0 and dp[i][j] == dp[i][j - 1] + 1:
            ops.append(("ins", i - 1, j - 1))
            j -= 1
        elif i > 0 and j > 0 and dp[i][j] == dp[i - 1][j - 1] + 1:
            ops.append(("take", i - 1, j - 1))
            i, j = i - 1, j - 1
        else:
            ops.append(("del", i - 1, -1))
            i -= 1
    ops.reverse()

    labels = [""] * m
    leading: list[str] = []
    for op, si, gj in ops:
        if op == "ins":
            if si < 0:
                leading.append(gold[gj])
            else:
                labels[si] += gold[gj]
        elif op == "take":
            labels[si] += gold[gj]
    if leading:
        labels[0] = "".join(leading) + labels[0]

    for pos, label in enumerate(labels):
        if len(label) > MAX_LABEL_LEN:
            raise AlignmentOverflow(
                f"label {label!r} at position {pos} exceeds {MAX_LABEL_LEN} characters"
            )
    return labels


def decode_labels(chunk_labels: Sequence[Sequence[str]]) -> str:
    """Inverse of alignment: concatenate labels, '_' becomes a space."""
    parts = ["".join(labels).replace(BOUNDARY, " ") for labels in chunk_labels]
    return " ".join(p for p in parts if p)


def partition_gold_words(chunks: Sequence[Chunk], words: Sequence[str]) -> list[list[str]]:
    """Split a flat word sequence into one group per chunk.

    Chooses the consecutive grouping minimizing total edit distance
    between each chunk and its group; deterministic (earliest split on
    ties).
    """
    n_chunks, n_words = len(chunks), len(words)
    if n_words < n_chunks:
        raise AlignmentMismatch(
            f"{n_words} words cannot cover {n_chunks} chunks"
        )
    from .lattice import levenshtein

    INF = float("inf")
    cost = [[INF] * (n_words + 1) for _ in range(n_chunks + 1)]
    back = [[-1] * (n_words + 1) for _ in range(n_chunks + 1)]
    cost[0][0] = 0.0
    for i in range(1, n_chunks + 1):
        text = chunks[i - 1].text
        for k in range(i, n_words + 1):
            for j in range(i - 1, k):
                if cost[i - 1][j] == INF:
                    continue
                c = cost[i - 1][j] + levenshtein(text, BOUNDARY.join(words[j:k]))
                if c < cost[i][k]:
                    cost[i][k] = c
                    back[i][k] = j
    if cost[n_chunks][n_words] == INF:
        raise AlignmentMismatch("no valid chunk grouping")
    groups: list[list[str]] = []
    k = n_words
    for i in range(n_chunks, 0, -1):
        j = back[i][k]
        groups.append(list(words[j:k]))
        k = j
    groups.reverse()
    return groups


def sentence_labels(text: str, gold: str) -> list[list[str]]:
    """Per-chunk label lists for a (surface, gold segmentation) pair."""
    chunks = split_chunks(text)
    groups = partition_gold_words(chunks, gold.split())
    return [
        align_gold_labels(chunk.text, " ".join(group))
        for chunk, group in zip(chunks, groups)
    ]


@dataclass(frozen=True)
class LabelVocab:
    """Output vocabulary: labels plus an unknown-label fallback."""

    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        if UNK_LABEL not in self.labels:
            raise ValueError("vocabulary must contain the fallback label")
        object.__setattr__(
            self, "_index", {lab: i for i, lab in enumerate(self.labels)}
        )

    @property
    def index(self) -> dict[str, int]:
        return self._index

    def __len__(self) -> int:
        return len(self.labels)

    def id_of(self, label: str) -> int:
        return self.index.get(label, self.index[UNK_LABEL])

    def id_of_strict(self, label: str) -> int:
        try:
            return self.index[label]
        except KeyError:
            raise UnknownLabel(f"label {label!r} not in vocabulary") from None

    @staticmethod
    def build(
        inputs: Sequence[str], chunk_labels: Sequence[Sequence[Sequence[str]]]
    ) -> "LabelVocab":
        """Vocabulary from training alignments plus every input character."""
        seen: set[str] = set()
        for text in inputs:
            seen.update(ch for ch in text if not ch.isspace())
        for per_chunk in chunk_labels:
            for labels in per_chunk:
                seen.update(labels)
        ordered = sorted(seen) + [UNK_LABEL]
        return LabelVocab(tuple(ordered))
