"""Detection and repair of predictions outside the candidate space.

A chunk prediction is corrupted when one of its words matches no
candidate node in that chunk.  Corrupted chunks are replaced by the
best-scoring lattice path; untouched chunks pass through verbatim.

The path score multiplies the per-character geometric-mean label
probability under the encoder by penalties for high character-LM
perplexity and for longer word sequences.  Using the geometric mean
(rather than the raw log-likelihood, which is negative) keeps the
score increasing in model likelihood while the word-count division
still penalizes over-segmentation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import exp
from typing import Sequence

import numpy as np

from .charlm import CharLM
from .errors import AlignmentMismatch, NoPath
from .lattice import Chunk, Lattice, Path, enumerate_paths
from .model import EncoderParams, encoder_forward, log_softmax, loglik_from_logprobs


@dataclass(frozen=True)
class PathScore:
    score: float
    loglik: float
    geo_mean: float
    perplexity: float
    n_words: int


@dataclass
class ChunkAction:
    """Per-chunk rectification diagnostic."""

    chunk_index: int
    corrupted: bool
    replaced: bool
    n_paths: int = 0
    truncated: bool = False
    chosen_score: float | None = None


@dataclass
class RectifyResult:
    chunks: list[str]
    actions: list[ChunkAction] = field(default_factory=list)

    @property
    def text(self) -> str:
        return " ".join(self.chunks)


def detect_corrupted(pred_chunks: Sequence[str], lattice: Lattice) -> list[Chunk]:
    """Chunks whose prediction uses a word absent from the lattice."""
    if len(pred_chunks) != len(lattice.chunks):
        raise AlignmentMismatch(
            f"prediction has {len(pred_chunks)} chunks, lattice {len(lattice.chunks)}"
        )
    out: list[Chunk] = []
    for chunk, pred in zip(lattice.chunks, pred_chunks):
        available = {n.text for n in lattice.chunk_candidates(chunk)}
        # Single characters are always in the solution space: they sit
        # in the lattice as character nodes rather than candidates.
        available.update(
            n.text for n in lattice.char_nodes if chunk.contains(n)
        )
        if any(word not in available for word in pred.split()):
            out.append(chunk)
    return out


def score_path_from_logprobs(
    logp: np.ndarray, lattice: Lattice, path: Path, params: EncoderParams, lm: CharLM
) -> PathScore:
    """Score using precomputed per-character label log-probabilities."""
    ll = loglik_from_logprobs(logp, lattice, path, params.labels)
    n_chars = len(lattice.chunk_char_positions(path.chunk))
    geo = 0.0 if ll == float("-inf") else exp(ll / max(n_chars, 1))
    rho = lm.perplexity(path.segmentation)
    n_words = len(path.words)
    return PathScore(
        score=geo / (rho * n_words),
        loglik=ll,
        geo_mean=geo,
        perplexity=rho,
        n_words=n_words,
    )


def score_path(
    path: Path,
    lattice: Lattice,
    params: EncoderParams,
    lm: CharLM,
    mode: str = "sma",
) -> PathScore:
    logits, _ = encoder_forward(lattice, params, mode=mode)
    return score_path_from_logprobs(log_softmax(logits), lattice, path, params, lm)


def best_path(scored: list[tuple[Path, PathScore]]) -> tuple[Path, PathScore]:
    """Highest score; ties go to the lexicographically smallest words."""
    best = scored[0]
    for cand in scored[1:]:
        if cand[1].score > best[1].score or (
            cand[1].score == best[1].score and cand[0].texts < best[0].texts
        ):
            best = cand
    return best


def prcp_rectify(
    pred_chunks: Sequence[str],
    lattice: Lattice,
    params: EncoderParams,
    lm: CharLM,
    max_paths: int = 10_000,
    mode: str = "sma",
) -> RectifyResult:
    """Replace corrupted chunk predictions with the top-ranked path."""
    corrupted = set(detect_corrupted(pred_chunks, lattice))
    result = RectifyResult(chunks=list(pred_chunks))
    logp: np.ndarray | None = None
    for i, chunk in enumerate(lattice.chunks):
        if chunk not in corrupted:
            result.actions.append(ChunkAction(i, corrupted=False, replaced=False))
            continue
        action = ChunkAction(i, corrupted=True, replaced=False)
        try:
            found = enumerate_paths(lattice, chunk, max_paths=max_paths)
        except NoPath:
            result.actions.append(action)
            continue
        if logp is None:
            logits, _ = encoder_forward(lattice, params, mode=mode)
            logp = log_softmax(logits)
        scored = [
            (p, score_path_from_logprobs(logp, lattice, p, params, lm))
            for p in found.paths
        ]
        chosen, score = best_path(scored)
        result.chunks[i] = chosen.segmentation
        action.replaced = True
        action.n_paths = len(found.paths)
        action.truncated = found.truncated
        action.chosen_score = score.score
        result.actions.append(action)
    return result
