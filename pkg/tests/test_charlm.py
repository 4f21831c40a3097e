"""Character n-gram model: probabilities, smoothing, perplexity."""

import math

import numpy as np
import pytest

from sandhiseg.charlm import END, UNK, CharLM, train_charlm
from sandhiseg.errors import EmptyCorpus, EmptyText


class TestTraining:
    def test_near_deterministic_bigram(self):
        lm = train_charlm(["ab"], order=1, lam=1e-9)
        assert lm.prob(("a",), "b") == pytest.approx(1.0, abs=1e-6)

    def test_hand_counted_add_one(self):
        lm = train_charlm(["aa", "ab"], order=1, lam=1.0)
        assert lm.vocab == frozenset({"a", "b", UNK, END})
        # context "a" seen 3 times (a, END from "aa"; b from "ab")
        assert lm.prob(("a",), "b") == pytest.approx((1 + 1) / (3 + 4))

    def test_conditionals_sum_to_one(self):
        rng = np.random.default_rng(4)
        for _ in range(100):
            n = int(rng.integers(1, 6))
            corpus = [
                "".join("abc "[i] for i in rng.integers(0, 4, rng.integers(1, 12))).strip() or "a"
                for _ in range(n)
            ]
            order = int(rng.integers(1, 4))
            lm = train_charlm(corpus, order=order, lam=float(rng.uniform(0.01, 2.0)))
            for ctx in list(lm.counts)[:20]:
                total = sum(lm.prob(ctx, sym) for sym in lm.vocab)
                assert total == pytest.approx(1.0, abs=1e-9)

    def test_empty_corpus(self):
        with pytest.raises(EmptyCorpus):
            train_charlm([], order=2)


class TestPerplexity:
    def test_uniform_equals_vocab_size(self):
        lm = CharLM.uniform({"a", "b", "c"})
        assert len(lm.vocab) == 5
        assert lm.perplexity("abc ab") == pytest.approx(5.0, abs=1e-9)

    def test_memorized_text_approaches_one(self):
        lm = train_charlm(["abab"], order=3, lam=1e-12)
        assert lm.perplexity("abab") == pytest.approx(1.0, abs=1e-6)

    def test_hand_computed_geometric_mean(self):
        lm = train_charlm(["aa", "ab"], order=1, lam=1.0)
        # events for "ab": p(a|BOS), p(b|a), p(END|b)
        p1 = (2 + 1) / (2 + 4)
        p2 = (1 + 1) / (3 + 4)
        p3 = (1 + 1) / (1 + 4)
        expected = math.exp(-(math.log(p1) + math.log(p2) + math.log(p3)) / 3)
        assert lm.perplexity("ab") == pytest.approx(expected, abs=1e-12)

    def test_single_pass_equals_summed_logs(self):
        lm = train_charlm(["kim etat", "bahu"], order=2, lam=0.3)
        text = "kim bahu"
        total, n = lm.logprob(text)
        manual = 0.0
        for ctx, sym in lm._events(text):
            manual += math.log(lm.prob(ctx, sym))
        assert total == pytest.approx(manual, abs=1e-9)
        assert lm.perplexity(text) == pytest.approx(math.exp(-manual / n), abs=1e-9)

    def test_lambda_monotone_on_training_text(self):
        corpus = ["rama asti", "deva iti"]
        prev = None
        for lam in (2.0, 1.0, 0.5, 0.1, 0.01):
            rho = train_charlm(corpus, order=3, lam=lam).perplexity("rama asti")
            if prev is not None:
                assert rho <= prev + 1e-12
            prev = rho

    def test_proper_model_perplexity_at_least_one(self):
        lm = train_charlm(["abc", "abd"], order=2, lam=0.5)
        for text in ("abc", "zzz", "a"):
            assert lm.perplexity(text) >= 1.0

    def test_empty_text(self):
        lm = CharLM.uniform({"a"})
        with pytest.raises(EmptyText):
            lm.perplexity("")

    def test_unknown_characters_use_fallback(self):
        lm = train_charlm(["aaaa"], order=1, lam=0.5)
        assert lm.perplexity("zzzz") > 1.0
