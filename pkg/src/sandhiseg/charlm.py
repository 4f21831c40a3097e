"""Character n-gram language model with add-lambda smoothing.

Scores segmentation candidates by perplexity: spaces and the end
marker are scored events, so over-merged or over-split text pays in
probability.  Counts are plain dictionaries so a trained model
round-trips exactly through JSON.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from math import exp, log
from typing import Iterable

from .errors import EmptyCorpus, EmptyText, InvalidConfig

BOS = "<s>"
END = "</s>"
UNK = "<unk>"

DEFAULT_ORDER = 5
DEFAULT_LAMBDA = 0.1


@dataclass
class CharLM:
    """Add-lambda smoothed model of order `order` (context length)."""

    order: int
    lam: float
    vocab: frozenset[str]
    counts: dict[tuple[str, ...], dict[str, int]] = field(default_factory=dict)
    context_totals: dict[tuple[str, ...], int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.order < 1:
            raise InvalidConfig(f"order must be >= 1, got {self.order}")
        if self.lam <= 0.0:
            raise InvalidConfig(f"smoothing lambda must be > 0, got {self.lam}")
        if END not in self.vocab or UNK not in self.vocab:
            raise InvalidConfig("vocab must include the end and unknown markers")

    @staticmethod
    def uniform(symbols: Iterable[str], order: int = 1, lam: float = 1.0) -> "CharLM":
        """Untrained model: every conditional is 1/|vocab|."""
        vocab = frozenset(symbols) | {END, UNK}
        return CharLM(order=order, lam=lam, vocab=vocab)

    def _norm(self, ch: str) -> str:
        return ch if ch in self.vocab else UNK

    def _events(self, text: str):
        ctx = [BOS] * self.order
        for ch in text:
            sym = self._norm(ch)
            yield tuple(ctx), sym
            ctx = ctx[1:] + [sym]
        yield tuple(ctx), END

    def prob(self, context: tuple[str, ...], symbol: str) -> float:
        """Smoothed conditional; sums to 1 over the vocabulary."""
        got = self.counts.get(context, {}).get(symbol, 0)
        total = self.context_totals.get(context, 0)
        return (got + self.lam) / (total + self.lam * len(self.vocab))

    def logprob(self, text: str) -> tuple[float, int]:
        """Total log-probability and number of scored events."""
        if not text:
            raise EmptyText("cannot score an empty string")
        total = 0.0
        n = 0
        for ctx, sym in self._events(text):
            total += log(self.prob(ctx, sym))
            n += 1
        return total, n

    def perplexity(self, text: str) -> float:
        """exp of the mean negative log-probability per event."""
        total, n = self.logprob(text)
        return exp(-total / n)


def train_charlm(
    corpus: Iterable[str], order: int = DEFAULT_ORDER, lam: float = DEFAULT_LAMBDA
) -> CharLM:
    """Fit counts over gold segmentations (spaces are ordinary symbols)."""
    sentences = [s for s in corpus if s]
    if not sentences:
        raise EmptyCorpus("training corpus is empty")
    alphabet: set[str] = set()
    for s in sentences:
        alphabet.update(s)
    lm = CharLM(order=order, lam=lam, vocab=frozenset(alphabet) | {END, UNK})
    counts: dict[tuple[str, ...], Counter] = defaultdict(Counter)
    for s in sentences:
        for ctx, sym in lm._events(s):
            counts[ctx][sym] += 1
    lm.counts = {ctx: dict(c) for ctx, c in counts.items()}
    lm.context_totals = {ctx: sum(c.values()) for ctx, c in counts.items()}
    return lm
