"""Word-level and rule-level segmentation metrics.

Word scores are multiset-based per sentence and macro-averaged, so a
repeated word must be predicted the right number of times.  Rule
metrics compare the surface locations where a juncture rewrite is
implied by gold vs. predicted segmentations.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

from .errors import AlignmentMismatch, AlignmentOverflow
from .labels import align_gold_labels, partition_gold_words
from .lattice import SandhiRule, normalize_text, split_chunks


@dataclass(frozen=True)
class SentenceScore:
    index: int
    n_chars: int
    precision: float
    recall: float
    f1: float
    perfect: bool


@dataclass(frozen=True)
class RuleMetrics:
    precision: float
    recall: float
    f1: float
    n_gold: int
    n_pred: int
    undefined: bool = False


@dataclass
class EvalReport:
    precision: float
    recall: float
    f1: float
    perfect_match: float
    n_sentences: int
    sentences: list[SentenceScore] = field(default_factory=list)
    per_rule: dict[str, RuleMetrics] = field(default_factory=dict)
    length_buckets: dict[int, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "perfect_match": self.perfect_match,
            "n_sentences": self.n_sentences,
            "per_rule": {
                name: {
                    "precision": m.precision,
                    "recall": m.recall,
                    "f1": m.f1,
                    "n_gold": m.n_gold,
                    "n_pred": m.n_pred,
                    "undefined": m.undefined,
                }
                for name, m in self.per_rule.items()
            },
            "length_buckets": {str(k): v for k, v in self.length_buckets.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2)


def sentence_prf(gold: str, pred: str) -> tuple[float, float, float]:
    """Multiset word overlap for one sentence."""
    g = Counter(gold.split())
    p = Counter(pred.split())
    inter = sum((g & p).values())
    n_g, n_p = sum(g.values()), sum(p.values())
    precision = inter / n_p if n_p else 0.0
    recall = inter / n_g if n_g else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


def word_prf(golds: Sequence[str], preds: Sequence[str]) -> tuple[float, float, float]:
    """Macro-averaged precision, recall, F1 across sentences."""
    if len(golds) != len(preds):
        raise AlignmentMismatch("gold and prediction counts differ")
    if not golds:
        raise AlignmentMismatch("nothing to evaluate")
    scores = [sentence_prf(g, p) for g, p in zip(golds, preds)]
    n = len(scores)
    return (
        sum(s[0] for s in scores) / n,
        sum(s[1] for s in scores) / n,
        sum(s[2] for s in scores) / n,
    )


def perfect_match(golds: Sequence[str], preds: Sequence[str]) -> float:
    """Percentage of sentences whose word multisets match exactly."""
    if len(golds) != len(preds):
        raise AlignmentMismatch("gold and prediction counts differ")
    if not golds:
        raise AlignmentMismatch("nothing to evaluate")
    hits = sum(Counter(g.split()) == Counter(p.split()) for g, p in zip(golds, preds))
    return 100.0 * hits / len(golds)


def find_rule_sites(rule: SandhiRule, surface: str, segmentation: str) -> set[int]:
    """Surface indices where the segmentation implies the rule.

    A site is an occurrence of the rule's surface string f (after its
    left context) whose aligned labels spell out the underlying split.
    Sentences whose segmentation cannot be aligned contribute no sites.
    """
    surface = normalize_text(surface)
    try:
        chunks = split_chunks(surface)
        groups = partition_gold_words(chunks, normalize_text(segmentation).split())
    except AlignmentMismatch:
        return set()
    want = rule.split_text
    sites: set[int] = set()
    for chunk, group in zip(chunks, groups):
        try:
            labels = align_gold_labels(chunk.text, " ".join(group))
        except AlignmentOverflow:
            continue
        text = chunk.text
        for ofs in range(len(text) - len(rule.f) + 1):
            if text[ofs : ofs + len(rule.f)] != rule.f:
                continue
            if rule.x:
                if ofs - len(rule.x) < 0:
                    continue
                if text[ofs - len(rule.x) : ofs] != rule.x:
                    continue
            spelled = "".join(labels[ofs : ofs + len(rule.f)])
            if spelled == want:
                sites.add(chunk.start + ofs)
    return sites


def rule_char_metrics(
    rule: SandhiRule,
    golds: Sequence[str],
    preds: Sequence[str],
    surfaces: Sequence[str],
) -> RuleMetrics:
    """Set-based precision/recall/F1 over rule-occurrence locations."""
    if not (len(golds) == len(preds) == len(surfaces)):
        raise AlignmentMismatch("gold, prediction and surface counts differ")
    s_gold: set[tuple[int, int]] = set()
    s_pred: set[tuple[int, int]] = set()
    for i, (g, p, srf) in enumerate(zip(golds, preds, surfaces)):
        s_gold.update((i, pos) for pos in find_rule_sites(rule, srf, g))
        s_pred.update((i, pos) for pos in find_rule_sites(rule, srf, p))
    inter = len(s_gold & s_pred)
    undefined = len(s_pred) == 0
    precision = inter / len(s_pred) if s_pred else 0.0
    recall = inter / len(s_gold) if s_gold else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return RuleMetrics(precision, recall, f1, len(s_gold), len(s_pred), undefined)


def length_bucket_f1(
    lengths: Sequence[int], f1s: Sequence[float], bucket_width: int = 10
) -> dict[int, float]:
    """Mean F1 per character-length bucket; empty buckets omitted.

    Keys are bucket lower bounds: bucket k covers [k, k + width).
    """
    sums: dict[int, list[float]] = {}
    for n, f in zip(lengths, f1s):
        lo = (n // bucket_width) * bucket_width
        sums.setdefault(lo, []).append(f)
    return {lo: sum(v) / len(v) for lo, v in sorted(sums.items())}


def evaluate(
    golds: Sequence[str],
    preds: Sequence[str],
    surfaces: Sequence[str] | None = None,
    rules: Sequence[SandhiRule] | None = None,
    bucket_width: int = 10,
) -> EvalReport:
    """Full report: macro word scores, perfect match, analyses."""
    p, r, f = word_prf(golds, preds)
    pm = perfect_match(golds, preds)
    sentences: list[SentenceScore] = []
    for i, (g, pr) in enumerate(zip(golds, preds)):
        sp, sr, sf = sentence_prf(g, pr)
        ref = surfaces[i] if surfaces is not None else g
        n_chars = sum(1 for ch in ref if not ch.isspace())
        sentences.append(
            SentenceScore(i, n_chars, sp, sr, sf, Counter(g.split()) == Counter(pr.split()))
        )
    report = EvalReport(
        precision=p,
        recall=r,
        f1=f,
        perfect_match=pm,
        n_sentences=len(sentences),
        sentences=sentences,
        length_buckets=length_bucket_f1(
            [s.n_chars for s in sentences], [s.f1 for s in sentences], bucket_width
        ),
    )
    if rules and surfaces is not None:
        for rule in rules:
            name = f"{rule.split_text}->{rule.f}"
            report.per_rule[name] = rule_char_metrics(rule, golds, preds, surfaces)
    return report
