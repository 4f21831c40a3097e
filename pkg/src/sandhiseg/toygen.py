"""Synthetic sandhi corpus with known ground truth.

Samples word sequences from a small lexicon and fuses junctures with
single-character rewrite rules, so every sentence comes with its gold
segmentation and the exact surface span of every word.  Fused
junctures share their surface character between the two words, the
same overlap convention the lattice uses.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import SandhiRule

# Five juncture rules; the first three map distinct splits onto the
# same surface vowel, which is what makes the task ambiguous.
DEFAULT_RULES = (
    SandhiRule(u="a", v="a", f="ā"),
    SandhiRule(u="ā", v="a", f="ā"),
    SandhiRule(u="ā", v="ā", f="ā"),
    SandhiRule(u="a", v="i", f="e"),
    SandhiRule(u="i", v="i", f="ī"),
)

DEFAULT_LEXICON = (
    "rama", "deva", "nara", "kavi", "mati", "sītā", "mālā",
    "asti", "agni", "iti", "indra", "āpa", "eva", "gaja",
)


@dataclass(frozen=True)
class ToySentence:
    surface: str
    gold: str
    candidates: tuple[tuple[str, int, int], ...]


def _fusable(rules, left: str, right: str) -> SandhiRule | None:
    for rule in rules:
        if len(rule.u) == 1 and len(rule.v) == 1 and len(rule.f) == 1:
            if left.endswith(rule.u) and right.startswith(rule.v):
                return rule
    return None


def generate_sentence(
    rng: np.random.Generator,
    rules=DEFAULT_RULES,
    lexicon=DEFAULT_LEXICON,
    min_words: int = 2,
    max_words: int = 4,
    p_fuse: float = 0.75,
) -> ToySentence:
    k = int(rng.integers(min_words, max_words + 1))
    words = [lexicon[int(i)] for i in rng.integers(0, len(lexicon), size=k)]

    chunks: list[str] = [words[0]]
    spans: list[list[tuple[str, int, int]]] = [[(words[0], 0, len(words[0]) - 1)]]
    for word in words[1:]:
        prev_word = spans[-1][-1][0]
        rule = _fusable(rules, prev_word, word)
        if rule is not None and rng.random() < p_fuse:
            chunk = chunks[-1]
            fused_at = len(chunk) - 1
            w, h, _ = spans[-1][-1]
            spans[-1][-1] = (w, h, fused_at)
            spans[-1].append((word, fused_at, fused_at + len(word) - 1))
            chunks[-1] = chunk[:-1] + rule.f + word[1:]
        else:
            chunks.append(word)
            spans.append([(word, 0, len(word) - 1)])

    surface = " ".join(chunks)
    offsets: list[int] = []
    pos = 0
    for chunk in chunks:
        offsets.append(pos)
        pos += len(chunk) + 1
    candidates = tuple(
        (w, ofs + h, ofs + t)
        for ofs, chunk_spans in zip(offsets, spans)
        for (w, h, t) in chunk_spans
    )
    return ToySentence(surface, " ".join(words), candidates)


def generate_corpus(
    n: int,
    seed: int = 0,
    rules=DEFAULT_RULES,
    lexicon=DEFAULT_LEXICON,
    min_words: int = 2,
    max_words: int = 4,
    p_fuse: float = 0.75,
) -> list[ToySentence]:
    rng = np.random.default_rng(seed)
    return [
        generate_sentence(rng, rules, lexicon, min_words, max_words, p_fuse)
        for _ in range(n)
    ]
