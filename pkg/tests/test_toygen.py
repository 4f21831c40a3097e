"""Synthetic corpus generator invariants."""

from sandhiseg.labels import decode_labels, sentence_labels
from sandhiseg.lattice import ingest_candidate_space, split_chunks
from sandhiseg.toygen import generate_corpus


class TestGenerator:
    def test_deterministic(self):
        a = generate_corpus(20, seed=4)
        b = generate_corpus(20, seed=4)
        assert a == b

    def test_gold_words_from_lexicon(self):
        from sandhiseg.toygen import DEFAULT_LEXICON

        for s in generate_corpus(30, seed=6):
            assert all(w in DEFAULT_LEXICON for w in s.gold.split())

    def test_every_sentence_is_alignable(self):
        for s in generate_corpus(100, seed=8):
            labels = sentence_labels(s.surface, s.gold)
            assert decode_labels(labels) == s.gold

    def test_ingest_recovers_exact_spans(self):
        # exact claims survive rectification, including fused words
        # whose surface differs and repeated words across chunks
        from sandhiseg.lattice import rectify_mapping

        for s in generate_corpus(50, seed=10):
            lat = ingest_candidate_space(s.surface, s.candidates)
            assert lat.n_dropped == 0
            for word, h, t in s.candidates:
                assert rectify_mapping(s.surface, word, h, t) == (h, t)
            got = {(n.text, n.head, n.tail) for n in lat.candidates}
            assert got == set(s.candidates)

    def test_candidates_tile_every_chunk(self):
        from sandhiseg.lattice import (
            Lattice,
            SpanNode,
            build_char_nodes,
            enumerate_paths,
            split_chunks,
        )

        for s in generate_corpus(50, seed=12):
            lat = Lattice(
                input=s.surface,
                chunks=tuple(split_chunks(s.surface)),
                char_nodes=tuple(build_char_nodes(s.surface)),
                candidates=tuple(
                    SpanNode(w, h, t) for w, h, t in dict.fromkeys(s.candidates)
                ),
                source="external",
            )
            for chunk in lat.chunks:
                paths = enumerate_paths(lat, chunk).paths
                assert any(" ".join(p.texts) in s.gold for p in paths)

    def test_fusions_present(self):
        corpus = generate_corpus(50, seed=11)
        fused = [s for s in corpus if len(s.surface.split()) != len(s.gold.split())]
        assert len(fused) >= 10
