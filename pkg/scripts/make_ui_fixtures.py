#!/usr/bin/env python3
"""Generate shared junction fixtures for the frontend test suite.

Each fixture freezes, for one chunk and one selection state, the
engine's answers: which unselected candidates can still extend to a
complete tiling, and whether the selection already tiles the chunk.
The frontend recomputes both and must agree exactly.
"""

import json
import sys
from pathlib import Path

import numpy as np

from sandhiseg.lattice import enumerate_paths, ingest_candidate_space, ngram_lattice
from sandhiseg.errors import NoPath
from sandhiseg.service import tiles_chunk
from sandhiseg.toygen import generate_corpus

OUT = Path(__file__).resolve().parent.parent / "frontend" / "tests" / "fixtures" / "junction_fixtures.json"
N_FIXTURES = 20


def chunk_fixture(lattice, chunk, selected_keys, name):
    cands = lattice.chunk_candidates(chunk)
    index_of = {(n.text, n.head, n.tail): i for i, n in enumerate(cands)}
    try:
        tilings = [
            [index_of[(w.text, w.head, w.tail)] for w in p.words]
            for p in enumerate_paths(lattice, chunk).paths
        ]
    except NoPath:
        tilings = []
    selected = sorted(index_of[k] for k in selected_keys)
    enabled = set()
    for tiling in tilings:
        members = set(tiling)
        if all(s in members for s in selected):
            enabled.update(members - set(selected))
    spans = [(cands[i].text, cands[i].head, cands[i].tail) for i in selected]
    return {
        "name": name,
        "chunk": {"text": chunk.text, "start": chunk.start, "end": chunk.end},
        "candidates": [
            {"word": n.text, "head": n.head, "tail": n.tail} for n in cands
        ],
        "selected": selected,
        "enabled": sorted(enabled),
        "complete": tiles_chunk(chunk.start, chunk.end, spans),
    }


def main() -> int:
    rng = np.random.default_rng(2024)
    fixtures = []
    corpus = generate_corpus(40, seed=17)
    for s in corpus:
        if len(fixtures) >= N_FIXTURES - 2:
            break
        # true word spans plus a few n-gram distractors, like an
        # over-generating analyzer
        from sandhiseg.lattice import build_ngram_candidates

        extras = [
            (n.text, n.head, n.tail)
            for n in build_ngram_candidates(s.surface, 3)[::2][:6]
        ]
        lattice = ingest_candidate_space(s.surface, list(s.candidates) + extras)
        for chunk in lattice.chunks:
            if len(fixtures) >= N_FIXTURES - 2:
                break
            cands = lattice.chunk_candidates(chunk)
            if len(cands) < 2:
                continue
            try:
                paths = enumerate_paths(lattice, chunk).paths
            except NoPath:
                continue
            path = paths[int(rng.integers(0, len(paths)))]
            keys = [(w.text, w.head, w.tail) for w in path.words]
            take = int(rng.integers(0, len(keys) + 1))
            state = {0: [], 1: keys[:take], 2: keys}[int(rng.integers(0, 3))]
            fixtures.append(
                chunk_fixture(lattice, chunk, state, f"toy-{len(fixtures)}")
            )

    # denser lattices: n-gram fallback chunks
    for text in ("abcd", "kavya"):
        lattice = ngram_lattice(text, 3)
        fixtures.append(
            chunk_fixture(lattice, lattice.chunks[0], [], f"ngram-{text}")
        )

    fixtures = fixtures[:N_FIXTURES]
    assert len(fixtures) == N_FIXTURES
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps({"fixtures": fixtures}, ensure_ascii=False, indent=1) + "\n", encoding="utf-8")
    print(f"wrote {len(fixtures)} fixtures to {OUT}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
