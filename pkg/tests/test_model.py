"""Encoder primitives: scores, soft mask, masked softmax, forward."""

import math

import numpy as np
import pytest

from sandhiseg.errors import DegenerateRow, InvalidConfig
from sandhiseg.labels import LabelVocab
from sandhiseg.lattice import Path, ingest_candidate_space, ngram_lattice
from sandhiseg.model import (
    EncoderConfig,
    TokenVocab,
    attention_scores,
    encoder_forward,
    init_params,
    log_softmax,
    model_loglik,
    soft_mask,
    soft_masked_attention,
)


def toy_params(text="evāgni rama", d=8, heads=1, layers=1, seed=0, n_max=3):
    lattice = ngram_lattice(text, n_max)
    tokens = TokenVocab.build([n.text for n in lattice.nodes])
    labels = LabelVocab.build([text], [[list(text.replace(" ", ""))]])
    cfg = EncoderConfig(d_x=d, d_z=d, n_heads=heads, n_layers=layers, seed=seed)
    return lattice, init_params(cfg, tokens, labels)


class TestConfig:
    def test_width_must_divide_by_four(self):
        with pytest.raises(InvalidConfig):
            EncoderConfig(d_z=6)

    def test_heads_must_divide_width(self):
        with pytest.raises(InvalidConfig):
            EncoderConfig(d_z=8, n_heads=3)

    def test_dropout_range(self):
        with pytest.raises(InvalidConfig):
            EncoderConfig(dropout=1.0)


class TestAttentionScores:
    def test_zero_input(self):
        x = np.zeros((3, 4))
        w = np.ones((4, 4))
        assert np.array_equal(attention_scores(x, w, w), np.zeros((3, 3)))

    def test_scalar_case(self):
        c, q, k = 0.7, 1.3, -2.1
        e = attention_scores(np.array([[c]]), np.array([[q]]), np.array([[k]]))
        assert e[0, 0] == pytest.approx(c * q * c * k / math.sqrt(1))

    def test_linear_in_query_projection(self):
        rng = np.random.default_rng(0)
        x = rng.normal(size=(4, 6))
        wq = rng.normal(size=(6, 8))
        wk = rng.normal(size=(6, 8))
        np.testing.assert_allclose(
            attention_scores(x, 3.0 * wq, wk), 3.0 * attention_scores(x, wq, wk)
        )


class TestSoftMask:
    def test_zero_input_gives_half(self):
        x = np.zeros((3, 4))
        spans = np.ones((3, 3, 4))
        m = soft_mask(x, spans, np.ones((4, 4)), np.ones((4, 4)))
        np.testing.assert_allclose(m, 0.5)

    def test_saturates_toward_one(self):
        x = np.full((2, 4), 3.0)
        spans = np.full((2, 2, 4), 3.0)
        m = soft_mask(x, spans, np.eye(4), np.eye(4))
        assert np.all(m > 0.999)
        assert np.all(m < 1.0)

    def test_hand_computed_two_by_two(self):
        x = np.array([[1.0, 0.0], [0.0, 2.0]])
        spans = np.zeros((2, 2, 2))
        spans[0, 1] = [1.0, -1.0]
        spans[1, 0] = [-1.0, 1.0]
        wq = np.eye(2)
        wr = np.eye(2)
        q = x
        expected = np.empty((2, 2))
        for i in range(2):
            for j in range(2):
                raw = q[i] @ spans[i, j] / math.sqrt(2)
                expected[i, j] = 1.0 / (1.0 + math.exp(-raw))
        np.testing.assert_allclose(soft_mask(x, spans, wq, wr), expected, atol=1e-12)


class TestSoftMaskedAttention:
    def test_constant_mask_equals_softmax(self):
        rng = np.random.default_rng(1)
        e = rng.normal(size=(5, 5))
        for c in (0.3, 1.0):
            got = soft_masked_attention(e, np.full((5, 5), c))
            ref = np.exp(e - e.max(axis=1, keepdims=True))
            ref /= ref.sum(axis=1, keepdims=True)
            np.testing.assert_allclose(got, ref, atol=1e-12)

    def test_vanishing_mask_entry(self):
        e = np.zeros((1, 3))
        got = soft_masked_attention(e, np.array([[1e-300, 0.5, 0.5]]))
        assert got[0, 0] == pytest.approx(0.0, abs=1e-12)
        assert got[0, 1] == pytest.approx(0.5, abs=1e-9)

    def test_direct_formula(self):
        got = soft_masked_attention(np.array([[0.0, 0.0]]), np.array([[0.2, 0.8]]))
        np.testing.assert_allclose(got, [[0.2, 0.8]], atol=1e-12)

    def test_rows_sum_to_one(self):
        rng = np.random.default_rng(2)
        e = rng.normal(size=(6, 6)) * 3
        m = rng.uniform(0.01, 1.0, size=(6, 6))
        np.testing.assert_allclose(soft_masked_attention(e, m).sum(axis=1), 1.0, atol=1e-12)

    def test_degenerate_row(self):
        with pytest.raises(DegenerateRow):
            soft_masked_attention(np.zeros((1, 2)), np.zeros((1, 2)))


class TestEncoderForward:
    def test_deterministic(self):
        lattice, params = toy_params()
        a, _ = encoder_forward(lattice, params, mode="sma")
        b, _ = encoder_forward(lattice, params, mode="sma")
        assert np.array_equal(a, b)

    def test_logits_only_for_char_rows(self):
        lattice, params = toy_params()
        logits, _ = encoder_forward(lattice, params)
        assert logits.shape == (len(lattice.char_nodes), len(params.labels))

    def test_constant_mask_matches_vanilla(self):
        lattice, params = toy_params(seed=3)
        params.tensors["span_key"][:] = 0.0  # raw 0 -> mask 0.5 everywhere
        sma, _ = encoder_forward(lattice, params, mode="sma")
        van, _ = encoder_forward(lattice, params, mode="vanilla")
        np.testing.assert_allclose(sma, van, atol=1e-6)

    def test_classifier_is_linear_readout(self):
        lattice, params = toy_params(text="ab", d=8)
        logits, cache = encoder_forward(lattice, params)
        h = cache["h_final"][: len(lattice.char_nodes)]
        np.testing.assert_allclose(
            logits, h @ params.tensors["cls_w"] + params.tensors["cls_b"], atol=1e-12
        )

    def test_attention_rows_sum_to_one(self):
        lattice, params = toy_params(heads=2, seed=5)
        _, cache = encoder_forward(lattice, params, mode="sma")
        alpha = cache["layers"][0]["alpha"]
        np.testing.assert_allclose(alpha.sum(axis=-1), 1.0, atol=1e-9)

    def test_multi_head_shapes(self):
        lattice, params = toy_params(d=16, heads=4, layers=2)
        logits, _ = encoder_forward(lattice, params)
        assert logits.shape[0] == len(lattice.char_nodes)

    def test_unknown_candidate_uses_fallback_embedding(self):
        lattice, params = toy_params()
        other = ingest_candidate_space("zzzz", [("zz", 0, 1), ("zzz", 0, 2)])
        logits, _ = encoder_forward(other, params)
        assert np.all(np.isfinite(logits))


class TestModelLoglik:
    def make_uniform(self, text="abcd"):
        lattice = ingest_candidate_space(
            text, [("ab", 0, 1), ("cd", 2, 3), ("abcd", 0, 3)]
        )
        tokens = TokenVocab.build([n.text for n in lattice.nodes])
        labels = LabelVocab.build([text], [[list(text)]])
        cfg = EncoderConfig(d_x=8, d_z=8, seed=0)
        params = init_params(cfg, tokens, labels)
        params.tensors["cls_w"][:] = 0.0
        params.tensors["cls_b"][:] = 0.0
        return lattice, params

    def test_uniform_model(self):
        lattice, params = self.make_uniform()
        path = Path((lattice.candidates[1],), lattice.chunks[0])  # "abcd" node
        k = len(params.labels)
        assert model_loglik(lattice, params, path) == pytest.approx(-4 * math.log(k))

    def test_saturated_model(self):
        text = "aaaa"
        lattice = ingest_candidate_space(text, [("aaaa", 0, 3)])
        tokens = TokenVocab.build([n.text for n in lattice.nodes])
        labels = LabelVocab.build([text], [[list(text)]])
        params = init_params(EncoderConfig(d_x=8, d_z=8, seed=0), tokens, labels)
        params.tensors["cls_w"][:] = 0.0
        params.tensors["cls_b"][:] = 0.0
        params.tensors["cls_b"][labels.id_of("a")] = 50.0
        path = Path((lattice.candidates[0],), lattice.chunks[0])
        ll = model_loglik(lattice, params, path)
        assert -1e-12 < ll <= 0.0

    def test_hand_summed_logsoftmax(self):
        lattice, params = self.make_uniform()
        logits, _ = encoder_forward(lattice, params)
        path = Path((lattice.candidates[0], lattice.candidates[2]), lattice.chunks[0])
        logp = log_softmax(logits)
        expected = sum(
            logp[i, params.labels.id_of(c)] for i, c in enumerate("abcd")
        )
        assert model_loglik(lattice, params, path) == pytest.approx(expected)

    def test_overflowing_path_gets_minus_inf(self):
        lattice, params = self.make_uniform()
        weird = ingest_candidate_space("abcd", [("abcdzzzzz", 0, 3)])
        path = Path((weird.candidates[0],), weird.chunks[0])
        tokens = TokenVocab.build([n.text for n in weird.nodes])
        labels = params.labels
        p2 = init_params(EncoderConfig(d_x=8, d_z=8), tokens, labels)
        assert model_loglik(weird, p2, path) == float("-inf")
