"""Transformer encoder over lattice nodes with soft-masked attention.

Dense float64 numpy throughout, with hand-written backward passes so
analytic gradients can be verified against central finite differences.
Character and candidate nodes share one token embedding table; the
classifier reads only the character rows.

The soft mask reweights exponentiated attention scores per query using
the span-relation encoding between the two nodes, squashed through the
logistic function so the mask stays inside (0, 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .encoding import relation_features
from .errors import (
    AlignmentOverflow,
    DegenerateRow,
    InvalidConfig,
    NumericalError,
)
from .labels import UNK_LABEL, LabelVocab, align_gold_labels, decode_labels
from .lattice import Lattice, Path

Mode = Literal["sma", "vanilla"]

UNK_TOKEN = "<unk>"
LN_EPS = 1e-5


@dataclass(frozen=True)
class EncoderConfig:
    d_x: int = 64
    d_z: int = 64
    n_heads: int = 1
    n_layers: int = 1
    dropout: float = 0.0
    n_max: int = 4
    seed: int = 0

    def __post_init__(self) -> None:
        if self.d_x < 1 or self.d_z < 1 or self.n_layers < 1 or self.n_heads < 1:
            raise InvalidConfig("dimensions and layer/head counts must be positive")
        if self.d_z % 4 != 0:
            raise InvalidConfig(f"d_z must be divisible by 4, got {self.d_z}")
        if self.d_z % self.n_heads != 0:
            raise InvalidConfig("d_z must be divisible by n_heads")
        if not 0.0 <= self.dropout < 1.0:
            raise InvalidConfig("dropout must lie in [0, 1)")


@dataclass(frozen=True)
class TokenVocab:
    """Node-text vocabulary with an unknown-word fallback."""

    tokens: tuple[str, ...]

    def __post_init__(self) -> None:
        if UNK_TOKEN not in self.tokens:
            raise ValueError("vocabulary must contain the fallback token")
        object.__setattr__(
            self, "_index", {tok: i for i, tok in enumerate(self.tokens)}
        )

    def __len__(self) -> int:
        return len(self.tokens)

    def id_of(self, text: str) -> int:
        return self._index.get(text, self._index[UNK_TOKEN])

    @staticmethod
    def build(texts: Sequence[str]) -> "TokenVocab":
        return TokenVocab(tuple(sorted(set(texts))) + (UNK_TOKEN,))


@dataclass
class EncoderParams:
    """All learnable tensors plus the vocabularies they are tied to."""

    config: EncoderConfig
    tokens: TokenVocab
    labels: LabelVocab
    tensors: dict[str, np.ndarray]

    def copy(self) -> "EncoderParams":
        return EncoderParams(
            self.config, self.tokens, self.labels,
            {k: v.copy() for k, v in self.tensors.items()},
        )

    def check_finite(self) -> None:
        for name, t in self.tensors.items():
            if not np.all(np.isfinite(t)):
                raise NumericalError(f"tensor {name} has non-finite entries")


def init_params(
    config: EncoderConfig, tokens: TokenVocab, labels: LabelVocab
) -> EncoderParams:
    """Uniform(-1/sqrt(d_x), 1/sqrt(d_x)) matrices; unit mask scale."""
    rng = np.random.default_rng(config.seed)
    bound = 1.0 / math.sqrt(config.d_x)
    d_x, d_z = config.d_x, config.d_z

    def mat(*shape: int) -> np.ndarray:
        return rng.uniform(-bound, bound, size=shape)

    t: dict[str, np.ndarray] = {"emb": mat(len(tokens), d_x)}
    for l in range(config.n_layers):
        t[f"attn_q.{l}"] = mat(d_x, d_z)
        t[f"attn_k.{l}"] = mat(d_x, d_z)
        t[f"attn_v.{l}"] = mat(d_x, d_z)
        t[f"attn_out.{l}"] = mat(d_z, d_x)
        t[f"ln_attn_g.{l}"] = np.ones(d_x)
        t[f"ln_attn_b.{l}"] = np.zeros(d_x)
        t[f"ffn_w1.{l}"] = mat(d_x, 4 * d_z)
        t[f"ffn_b1.{l}"] = np.zeros(4 * d_z)
        t[f"ffn_w2.{l}"] = mat(4 * d_z, d_x)
        t[f"ffn_b2.{l}"] = np.zeros(d_x)
        t[f"ln_ffn_g.{l}"] = np.ones(d_x)
        t[f"ln_ffn_b.{l}"] = np.zeros(d_x)
    t["span_key"] = mat(d_z, d_z)
    t["span_scale"] = np.array(1.0)
    t["cls_w"] = mat(d_x, len(labels))
    t["cls_b"] = np.zeros(len(labels))
    return EncoderParams(config, tokens, labels, t)


# --- primitive attention operations -----------------------------------


def attention_scores(x: np.ndarray, w_q: np.ndarray, w_k: np.ndarray) -> np.ndarray:
    """Scaled dot-product scores between all node pairs."""
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(w_q)) and np.all(np.isfinite(w_k))):
        raise NumericalError("non-finite input to attention scores")
    d_z = w_q.shape[1]
    q = x @ w_q
    k = x @ w_k
    return (q @ k.T) / math.sqrt(d_z)


def soft_mask(x: np.ndarray, spans: np.ndarray, w_q: np.ndarray, w_r: np.ndarray) -> np.ndarray:
    """Per-pair mask from span relations, squashed into (0, 1)."""
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(spans))):
        raise NumericalError("non-finite input to soft mask")
    d_z = w_r.shape[1]
    q = x @ w_q
    keyed = np.einsum("ije,ed->ijd", spans, w_r)
    raw = np.einsum("id,ijd->ij", q, keyed) / math.sqrt(d_z)
    return 1.0 / (1.0 + np.exp(-raw))


def soft_masked_attention(e: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Mask-reweighted softmax; every row sums to 1."""
    if mask.shape != e.shape:
        raise ValueError("score and mask shapes differ")
    if np.any(mask.max(axis=-1) <= 0.0):
        raise DegenerateRow("a mask row is entirely zero")
    u = np.exp(e - e.max(axis=-1, keepdims=True))
    weighted = mask * u
    return weighted / weighted.sum(axis=-1, keepdims=True)


def _layernorm(x: np.ndarray, g: np.ndarray, b: np.ndarray):
    mu = x.mean(axis=-1, keepdims=True)
    var = x.var(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + LN_EPS)
    xhat = (x - mu) * inv
    return g * xhat + b, (xhat, inv)


def _layernorm_backward(dy: np.ndarray, g: np.ndarray, stats) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    xhat, inv = stats
    dxhat = dy * g
    m1 = dxhat.mean(axis=-1, keepdims=True)
    m2 = (dxhat * xhat).mean(axis=-1, keepdims=True)
    dx = inv * (dxhat - m1 - xhat * m2)
    return dx, (dy * xhat).sum(axis=0), dy.sum(axis=0)


def _split_heads(x: np.ndarray, n_heads: int) -> np.ndarray:
    n, d = x.shape
    return x.reshape(n, n_heads, d // n_heads).transpose(1, 0, 2)


def _merge_heads(x: np.ndarray) -> np.ndarray:
    h, n, dh = x.shape
    return x.transpose(1, 0, 2).reshape(n, h * dh)


# --- full forward / backward ------------------------------------------


def encoder_forward(
    lattice: Lattice,
    params: EncoderParams,
    mode: Mode = "sma",
    train: bool = False,
    rng: np.random.Generator | None = None,
    spans: np.ndarray | None = None,
):
    """Logits for every input-character node; returns (logits, cache).

    Deterministic for fixed parameters when dropout is off; dropout
    draws come from the supplied generator during training.
    """
    cfg = params.config
    t = params.tensors
    nodes = lattice.nodes
    n = len(nodes)
    n_char = len(lattice.char_nodes)
    keep = 1.0 - cfg.dropout
    if train and cfg.dropout > 0.0 and rng is None:
        raise InvalidConfig("training with dropout requires a generator")

    ids = np.array([params.tokens.id_of(nd.text) for nd in nodes])
    x0 = t["emb"][ids]

    if spans is None:
        spans = relation_features(nodes, cfg.d_z)
    s_pre = t["span_scale"] * spans
    s = np.maximum(0.0, s_pre)

    cache = {
        "ids": ids, "x0": x0, "table": spans, "s_pre": s_pre, "s": s,
        "mode": mode, "n_char": n_char, "train": train, "layers": [],
    }

    h = x0
    sqrt_dz = math.sqrt(cfg.d_z)
    d_head = cfg.d_z // cfg.n_heads
    sqrt_dh = math.sqrt(d_head)

    for l in range(cfg.n_layers):
        lc: dict = {"h_in": h}
        q = h @ t[f"attn_q.{l}"]
        k = h @ t[f"attn_k.{l}"]
        v = h @ t[f"attn_v.{l}"]
        lc["q"], lc["k"], lc["v"] = q, k, v

        qh = _split_heads(q, cfg.n_heads)
        kh = _split_heads(k, cfg.n_heads)
        vh = _split_heads(v, cfg.n_heads)
        e = qh @ kh.transpose(0, 2, 1) / sqrt_dh
        lc["e"] = e

        u = np.exp(e - e.max(axis=-1, keepdims=True))
        if mode == "sma":
            keyed = np.einsum("ije,ed->ijd", s, t["span_key"])
            raw = np.einsum("id,ijd->ij", q, keyed) / sqrt_dz
            mask = 1.0 / (1.0 + np.exp(-raw))
            if np.any(mask.max(axis=-1) <= 0.0):
                raise DegenerateRow("a soft-mask row is entirely zero")
            weighted = mask[None, :, :] * u
            lc["keyed"], lc["mask"] = keyed, mask
        else:
            weighted = u
        denom = weighted.sum(axis=-1, keepdims=True)
        alpha = weighted / denom
        lc["u"], lc["denom"], lc["alpha"] = u, denom, alpha

        if train and cfg.dropout > 0.0:
            mask_a = (rng.random(alpha.shape) < keep).astype(np.float64)
            alpha_used = alpha * mask_a / keep
            lc["drop_attn"] = mask_a
        else:
            alpha_used = alpha
        lc["alpha_used"] = alpha_used

        ctx = _merge_heads(alpha_used @ vh)
        attn_out = ctx @ t[f"attn_out.{l}"]
        lc["ctx"], lc["attn_out"] = ctx, attn_out

        h1, ln1 = _layernorm(h + attn_out, t[f"ln_attn_g.{l}"], t[f"ln_attn_b.{l}"])
        lc["ln1"], lc["h1"] = ln1, h1

        f_pre = h1 @ t[f"ffn_w1.{l}"] + t[f"ffn_b1.{l}"]
        f_act = np.maximum(0.0, f_pre)
        if train and cfg.dropout > 0.0:
            mask_f = (rng.random(f_act.shape) < keep).astype(np.float64)
            f_used = f_act * mask_f / keep
            lc["drop_ffn"] = mask_f
        else:
            f_used = f_act
        f_out = f_used @ t[f"ffn_w2.{l}"] + t[f"ffn_b2.{l}"]
        lc["f_pre"], lc["f_used"], lc["f_out"] = f_pre, f_used, f_out

        h, ln2 = _layernorm(h1 + f_out, t[f"ln_ffn_g.{l}"], t[f"ln_ffn_b.{l}"])
        lc["ln2"] = ln2
        cache["layers"].append(lc)

    cache["h_final"] = h
    logits = h[:n_char] @ t["cls_w"] + t["cls_b"]
    if not np.all(np.isfinite(logits)):
        raise NumericalError("encoder produced non-finite logits")
    return logits, cache


def encoder_backward(
    lattice: Lattice, params: EncoderParams, cache: dict, dlogits: np.ndarray
) -> dict[str, np.ndarray]:
    """Gradients of a scalar loss w.r.t. every tensor, given dlogits."""
    cfg = params.config
    t = params.tensors
    grads = {name: np.zeros_like(arr) for name, arr in t.items()}
    n_char = cache["n_char"]
    mode = cache["mode"]
    keep = 1.0 - cfg.dropout
    sqrt_dz = math.sqrt(cfg.d_z)
    d_head = cfg.d_z // cfg.n_heads
    sqrt_dh = math.sqrt(d_head)

    h_final = cache["h_final"]
    grads["cls_w"] += h_final[:n_char].T @ dlogits
    grads["cls_b"] += dlogits.sum(axis=0)
    dh = np.zeros_like(h_final)
    dh[:n_char] = dlogits @ t["cls_w"].T

    ds_total = np.zeros_like(cache["s"])

    for l in range(cfg.n_layers - 1, -1, -1):
        lc = cache["layers"][l]
        dres2, dg2, db2 = _layernorm_backward(dh, t[f"ln_ffn_g.{l}"], lc["ln2"])
        grads[f"ln_ffn_g.{l}"] += dg2
        grads[f"ln_ffn_b.{l}"] += db2
        dh1 = dres2.copy()
        df_out = dres2

        grads[f"ffn_w2.{l}"] += lc["f_used"].T @ df_out
        grads[f"ffn_b2.{l}"] += df_out.sum(axis=0)
        df_used = df_out @ t[f"ffn_w2.{l}"].T
        if "drop_ffn" in lc:
            df_act = df_used * lc["drop_ffn"] / keep
        else:
            df_act = df_used
        df_pre = df_act * (lc["f_pre"] > 0.0)
        grads[f"ffn_w1.{l}"] += lc["h1"].T @ df_pre
        grads[f"ffn_b1.{l}"] += df_pre.sum(axis=0)
        dh1 += df_pre @ t[f"ffn_w1.{l}"].T

        dres1, dg1, db1 = _layernorm_backward(dh1, t[f"ln_attn_g.{l}"], lc["ln1"])
        grads[f"ln_attn_g.{l}"] += dg1
        grads[f"ln_attn_b.{l}"] += db1
        dh_in = dres1.copy()
        dattn_out = dres1

        grads[f"attn_out.{l}"] += lc["ctx"].T @ dattn_out
        dctx = dattn_out @ t[f"attn_out.{l}"].T

        dctx_h = _split_heads(dctx, cfg.n_heads)
        vh = _split_heads(lc["v"], cfg.n_heads)
        dalpha_used = dctx_h @ vh.transpose(0, 2, 1)
        dvh = lc["alpha_used"].transpose(0, 2, 1) @ dctx_h
        dv = _merge_heads(dvh)

        if "drop_attn" in lc:
            dalpha = dalpha_used * lc["drop_attn"] / keep
        else:
            dalpha = dalpha_used

        alpha, u, denom = lc["alpha"], lc["u"], lc["denom"]
        common = (dalpha * alpha).sum(axis=-1, keepdims=True)
        de = alpha * (dalpha - common)

        dq = np.zeros_like(lc["q"])
        if mode == "sma":
            # mask is shared across heads; accumulate its gradient.
            dmask = ((u / denom) * (dalpha - common)).sum(axis=0)
            raw_grad = dmask * lc["mask"] * (1.0 - lc["mask"])
            dq += np.einsum("ij,ijd->id", raw_grad, lc["keyed"]) / sqrt_dz
            dkeyed = raw_grad[:, :, None] * lc["q"][:, None, :] / sqrt_dz
            grads["span_key"] += np.einsum("ije,ijd->ed", cache["s"], dkeyed)
            ds_total += np.einsum("ijd,ed->ije", dkeyed, t["span_key"])

        qh = _split_heads(lc["q"], cfg.n_heads)
        kh = _split_heads(lc["k"], cfg.n_heads)
        dqh = de @ kh / sqrt_dh
        dkh = de.transpose(0, 2, 1) @ qh / sqrt_dh
        dq += _merge_heads(dqh)
        dk = _merge_heads(dkh)

        h_in = lc["h_in"]
        grads[f"attn_q.{l}"] += h_in.T @ dq
        grads[f"attn_k.{l}"] += h_in.T @ dk
        grads[f"attn_v.{l}"] += h_in.T @ dv
        dh_in += dq @ t[f"attn_q.{l}"].T
        dh_in += dk @ t[f"attn_k.{l}"].T
        dh_in += dv @ t[f"attn_v.{l}"].T
        dh = dh_in

    if mode == "sma":
        relu_gate = cache["s_pre"] > 0.0
        grads["span_scale"] += np.sum(ds_total * relu_gate * cache["table"])

    np.add.at(grads["emb"], cache["ids"], dh)
    return grads


# --- losses and likelihoods -------------------------------------------


def log_softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


def cross_entropy(logits: np.ndarray, label_ids: np.ndarray):
    """Mean negative log-likelihood and its gradient w.r.t. logits."""
    n = logits.shape[0]
    logp = log_softmax(logits)
    loss = -logp[np.arange(n), label_ids].mean()
    dlogits = np.exp(logp)
    dlogits[np.arange(n), label_ids] -= 1.0
    return loss, dlogits / n


def path_labels(path: Path) -> list[str]:
    """Per-character labels the path implies for its chunk."""
    return align_gold_labels(path.chunk.text, path.segmentation)


def loglik_from_logprobs(
    logp: np.ndarray, lattice: Lattice, path: Path, labels: LabelVocab
) -> float:
    """Sum of per-character label log-probabilities over the chunk."""
    try:
        lab = path_labels(path)
    except AlignmentOverflow:
        return float("-inf")
    rows = lattice.chunk_char_positions(path.chunk)
    return float(sum(logp[r, labels.id_of(l)] for r, l in zip(rows, lab)))


def model_loglik(
    lattice: Lattice, params: EncoderParams, path: Path, mode: Mode = "sma"
) -> float:
    """Log-likelihood of the path's labeling under the encoder."""
    logits, _ = encoder_forward(lattice, params, mode=mode)
    return loglik_from_logprobs(log_softmax(logits), lattice, path, params.labels)


def predict_chunk_words(
    lattice: Lattice, params: EncoderParams, mode: Mode = "sma"
) -> list[str]:
    """Greedy per-character decode, one segmentation string per chunk."""
    logits, _ = encoder_forward(lattice, params, mode=mode)
    unk = params.labels.id_of(UNK_LABEL)
    if len(params.labels) > 1:
        logits = logits.copy()
        logits[:, unk] = -np.inf
    best = logits.argmax(axis=-1)
    label_list = [params.labels.labels[i] for i in best]
    out: list[str] = []
    for chunk in lattice.chunks:
        rows = lattice.chunk_char_positions(chunk)
        out.append(decode_labels([[label_list[r] for r in rows]]))
    return out
