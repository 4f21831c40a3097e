"""The committed frontend fixtures must match the engine's answers.

Rebuilds each fixture's lattice and recomputes the enabled-candidate
set and completeness with the engine; drift here means the frontend
and the engine disagree about the junction contract.
"""

import json
from pathlib import Path

import pytest

from sandhiseg.errors import NoPath
from sandhiseg.lattice import Lattice, SpanNode, build_char_nodes, enumerate_paths, split_chunks
from sandhiseg.service import tiles_chunk

FIXTURES = Path(__file__).resolve().parent.parent / "frontend" / "tests" / "fixtures" / "junction_fixtures.json"


def load_fixtures():
    return json.loads(FIXTURES.read_text(encoding="utf-8"))["fixtures"]


def rebuild(fx):
    text = " " * fx["chunk"]["start"] + fx["chunk"]["text"]
    lattice = Lattice(
        input=text,
        chunks=tuple(split_chunks(text)),
        char_nodes=tuple(build_char_nodes(text)),
        candidates=tuple(
            SpanNode(c["word"], c["head"], c["tail"]) for c in fx["candidates"]
        ),
        source="external",
    )
    return lattice, lattice.chunks[0]


@pytest.mark.parametrize("fx", load_fixtures(), ids=lambda f: f["name"])
def test_fixture_matches_engine(fx):
    lattice, chunk = rebuild(fx)
    cands = lattice.chunk_candidates(chunk)
    index_of = {(n.text, n.head, n.tail): i for i, n in enumerate(cands)}
    try:
        tilings = [
            [index_of[(w.text, w.head, w.tail)] for w in p.words]
            for p in enumerate_paths(lattice, chunk).paths
        ]
    except NoPath:
        tilings = []
    selected = set(fx["selected"])
    enabled = set()
    for tiling in tilings:
        if selected <= set(tiling):
            enabled.update(set(tiling) - selected)
    assert sorted(enabled) == fx["enabled"]

    spans = [
        (cands[i].text, cands[i].head, cands[i].tail) for i in fx["selected"]
    ]
    assert tiles_chunk(chunk.start, chunk.end, spans) == fx["complete"]


def test_fixture_count():
    assert len(load_fixtures()) == 20
