"""Supervised training of the encoder on (surface, gold) pairs.

Sentences whose gold alignment needs labels longer than the cap are
excluded and counted, never silently dropped.  Training is
deterministic for a fixed seed: initialization, shuffling and dropout
all draw from generators seeded from the config.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .encoding import relation_features
from .errors import AlignmentMismatch, AlignmentOverflow, EmptyCorpus, EmptyInput
from .labels import LabelVocab, sentence_labels
from .lattice import Lattice, normalize_text
from .model import (
    EncoderConfig,
    EncoderParams,
    TokenVocab,
    cross_entropy,
    encoder_backward,
    encoder_forward,
    init_params,
    predict_chunk_words,
)

LatticeSource = Callable[[str], Lattice]


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 50
    learning_rate: float = 0.001
    dropout: float = 0.3
    batch_size: int = 16
    seed: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8

    def __post_init__(self) -> None:
        if self.epochs < 0 or self.learning_rate <= 0 or self.batch_size < 1:
            raise ValueError("epochs, learning rate and batch size must be positive")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError("dropout must lie in [0, 1)")


@dataclass
class TrainExample:
    lattice: Lattice
    labels: list[str]
    spans: np.ndarray | None = None


@dataclass
class TrainResult:
    params: EncoderParams
    loss_trace: list[float]
    n_used: int
    n_excluded: int
    mode: str


def label_loss(logits: np.ndarray, gold_labels: Sequence[str], vocab: LabelVocab) -> float:
    """Mean cross-entropy of the gold labels; unknown labels are fatal."""
    ids = np.array([vocab.id_of_strict(lab) for lab in gold_labels])
    loss, _ = cross_entropy(logits, ids)
    return float(loss)


def prepare_examples(
    pairs: Sequence[tuple[str, str]], lattice_source: LatticeSource
) -> tuple[list[TrainExample], int]:
    """Align every sentence; returns (usable examples, excluded count)."""
    examples: list[TrainExample] = []
    excluded = 0
    for text, gold in pairs:
        text = normalize_text(text)
        gold = normalize_text(gold)
        try:
            per_chunk = sentence_labels(text, gold)
            lattice = lattice_source(text)
        except (AlignmentOverflow, AlignmentMismatch, EmptyInput):
            excluded += 1
            continue
        flat = [lab for labels in per_chunk for lab in labels]
        examples.append(TrainExample(lattice, flat))
    return examples, excluded


def build_vocabs(examples: Sequence[TrainExample]) -> tuple[TokenVocab, LabelVocab]:
    texts = [n.text for ex in examples for n in ex.lattice.nodes]
    tokens = TokenVocab.build(texts)
    labels = LabelVocab.build(
        [ex.lattice.input for ex in examples], [[ex.labels] for ex in examples]
    )
    return tokens, labels


def sentence_pass(
    ex: TrainExample,
    params: EncoderParams,
    mode: str,
    train: bool = False,
    rng: np.random.Generator | None = None,
):
    """One forward/backward; returns (loss, grads)."""
    label_ids = np.array([params.labels.id_of_strict(lab) for lab in ex.labels])
    logits, cache = encoder_forward(
        ex.lattice, params, mode=mode, train=train, rng=rng, spans=ex.spans
    )
    loss, dlogits = cross_entropy(logits, label_ids)
    grads = encoder_backward(ex.lattice, params, cache, dlogits)
    return float(loss), grads


def grad_check(
    params: EncoderParams,
    example: TrainExample,
    eps: float = 1e-4,
    mode: str = "sma",
    names: Sequence[str] | None = None,
) -> float:
    """Max relative error, analytic vs. central finite differences.

    Checks every element of every tensor (or of the named subset) with
    dropout off; an empty subset checks nothing and returns 0.
    """
    label_ids = np.array([params.labels.id_of_strict(lab) for lab in example.labels])

    def loss_only() -> float:
        logits, _ = encoder_forward(example.lattice, params, mode=mode)
        loss, _ = cross_entropy(logits, label_ids)
        return float(loss)

    logits, cache = encoder_forward(example.lattice, params, mode=mode)
    _, dlogits = cross_entropy(logits, label_ids)
    analytic = encoder_backward(example.lattice, params, cache, dlogits)

    worst = 0.0
    for name, tensor in params.tensors.items():
        if names is not None and name not in names:
            continue
        flat = tensor.reshape(-1)
        ana = analytic[name].reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + eps
            hi = loss_only()
            flat[i] = orig - eps
            lo = loss_only()
            flat[i] = orig
            numeric = (hi - lo) / (2 * eps)
            denom = max(1e-8, abs(numeric) + abs(ana[i]))
            worst = max(worst, abs(numeric - ana[i]) / denom)
    return worst


def train(
    pairs: Sequence[tuple[str, str]],
    lattice_source: LatticeSource,
    config: TrainConfig = TrainConfig(),
    model_config: EncoderConfig = EncoderConfig(),
    mode: str = "sma",
) -> TrainResult:
    """Adam training loop; returns params plus the loss trace."""
    examples, excluded = prepare_examples(pairs, lattice_source)
    if not examples:
        raise EmptyCorpus("no usable training sentences")

    tokens, labels = build_vocabs(examples)
    cfg = replace(model_config, dropout=config.dropout, seed=config.seed)
    params = init_params(cfg, tokens, labels)
    for ex in examples:
        ex.spans = relation_features(ex.lattice.nodes, cfg.d_z)

    rng = np.random.default_rng(config.seed + 1)
    m = {k: np.zeros_like(v) for k, v in params.tensors.items()}
    v = {k: np.zeros_like(vv) for k, vv in params.tensors.items()}
    step = 0
    trace: list[float] = []
    n = len(examples)

    for _ in range(config.epochs):
        order = rng.permutation(n)
        epoch_loss = 0.0
        for lo in range(0, n, config.batch_size):
            batch = order[lo : lo + config.batch_size]
            acc = {k: np.zeros_like(t) for k, t in params.tensors.items()}
            for idx in batch:
                loss, grads = sentence_pass(
                    examples[idx], params, mode, train=True, rng=rng
                )
                epoch_loss += loss
                for k in acc:
                    acc[k] += grads[k]
            scale = 1.0 / len(batch)
            step += 1
            bc1 = 1.0 - config.beta1**step
            bc2 = 1.0 - config.beta2**step
            for k, tensor in params.tensors.items():
                g = acc[k] * scale
                m[k] = config.beta1 * m[k] + (1.0 - config.beta1) * g
                v[k] = config.beta2 * v[k] + (1.0 - config.beta2) * g * g
                tensor -= config.learning_rate * (m[k] / bc1) / (
                    np.sqrt(v[k] / bc2) + config.adam_eps
                )
        trace.append(epoch_loss / n)

    params.check_finite()
    return TrainResult(params, trace, len(examples), excluded, mode)


def training_perfect_match(
    result: TrainResult, pairs: Sequence[tuple[str, str]], lattice_source: LatticeSource
) -> float:
    """Training-set perfect match of the greedy decode (no rectification)."""
    from .metrics import perfect_match

    golds: list[str] = []
    preds: list[str] = []
    for text, gold in pairs:
        text = normalize_text(text)
        lattice = lattice_source(text)
        preds.append(" ".join(predict_chunk_words(lattice, result.params, result.mode)))
        golds.append(normalize_text(gold))
    return perfect_match(golds, preds)
