"""HTTP prediction API and annotation persistence.

Handlers share an immutable model snapshot; annotation writes are
serialized behind a single lock and appended to a JSON-lines file
(last write per id wins on reload), fsynced so a reread after a write
always returns the written value.
"""

from __future__ import annotations

import os
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel

import json

from .charlm import CharLM
from .errors import EmptyInput
from .lattice import (
    Lattice,
    SpanNode,
    can_follow,
    ingest_candidate_space,
    ngram_lattice,
    normalize_text,
    split_chunks,
)
from .model import EncoderParams, predict_chunk_words
from .prcp import prcp_rectify


@dataclass
class Segmenter:
    """Immutable inference bundle: encoder, char LM, candidate source.

    Auxiliary nodes come from the candidate file when the input is
    known ("auto"), from the n-gram fallback, from rewrite-rule nodes,
    or not at all (character-only ablation).
    """

    params: EncoderParams
    lm: CharLM
    mode: str = "sma"
    n_max: int = 4
    use_prcp: bool = True
    candidates: dict[str, list[tuple[str, int, int]]] = field(default_factory=dict)
    aux_source: str = "auto"
    rules: tuple = ()

    def lattice_for(self, text: str) -> Lattice:
        text = normalize_text(text)
        if self.aux_source == "auto":
            recs = self.candidates.get(text)
            if recs:
                return ingest_candidate_space(text, recs)
            return ngram_lattice(text, self.n_max)
        if self.aux_source == "ngram":
            return ngram_lattice(text, self.n_max)
        if self.aux_source == "rules":
            from .lattice import rule_lattice

            return rule_lattice(text, self.rules)
        if self.aux_source == "none":
            return ingest_candidate_space(text, [])
        raise ValueError(f"unknown auxiliary-node source {self.aux_source!r}")

    def segment(self, text: str) -> dict:
        lattice = self.lattice_for(text)
        chunk_preds = predict_chunk_words(lattice, self.params, self.mode)
        applied = [False] * len(lattice.chunks)
        if self.use_prcp and self.lm is not None:
            result = prcp_rectify(
                chunk_preds, lattice, self.params, self.lm, mode=self.mode
            )
            chunk_preds = result.chunks
            for action in result.actions:
                applied[action.chunk_index] = action.replaced
        chunks_out = []
        for i, chunk in enumerate(lattice.chunks):
            cands = lattice.chunk_candidates(chunk)
            chunks_out.append(
                {
                    "chunk": chunk.text,
                    "start": chunk.start,
                    "end": chunk.end,
                    "candidates": [
                        {"word": c.text, "head": c.head, "tail": c.tail} for c in cands
                    ],
                    "prediction": chunk_preds[i].split(),
                    "prcp_applied": applied[i],
                }
            )
        return {"input": lattice.input, "chunks": chunks_out}


def tiles_chunk(start: int, end: int, spans: Sequence[tuple[str, int, int]]) -> bool:
    """True when the selected spans cover [start, end] under the
    junction rule (adjacent, or one shared character)."""
    if not spans:
        return False
    nodes = sorted(
        (SpanNode(w, h, t) for w, h, t in spans), key=lambda n: (n.head, n.tail)
    )
    if nodes[0].head != start or nodes[-1].tail != end:
        return False
    return all(can_follow(a, b) for a, b in zip(nodes, nodes[1:]))


def annotation_status(text: str, selections: Sequence[Sequence[tuple[str, int, int]]]) -> str:
    chunks = split_chunks(normalize_text(text))
    if len(selections) != len(chunks):
        return "partial"
    ok = all(
        tiles_chunk(c.start, c.end, sel) for c, sel in zip(chunks, selections)
    )
    return "complete" if ok else "partial"


def export_text(selections: Sequence[Sequence[tuple[str, int, int]]]) -> str:
    parts = []
    for sel in selections:
        ordered = sorted(sel, key=lambda s: (s[1], s[2]))
        parts.append(" ".join(w for w, _, _ in ordered))
    return " ".join(p for p in parts if p)


class AnnotationStore:
    """JSON-lines store, one record per line, last write per id wins."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._records: dict[str, dict] = {}
        if self.path.exists():
            for line in self.path.read_text(encoding="utf-8").splitlines():
                if line.strip():
                    rec = json.loads(line)
                    self._records[rec["id"]] = rec

    def _append(self, record: dict) -> None:
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    def put(self, record: dict) -> None:
        with self._lock:
            self._records[record["id"]] = record
            self._append(record)

    def get(self, record_id: str) -> dict | None:
        return self._records.get(record_id)


class SelectionIn(BaseModel):
    word: str
    head: int
    tail: int


class AnnotationIn(BaseModel):
    input: str
    selections: list[list[SelectionIn]]


class SegmentIn(BaseModel):
    text: str


def _selection_tuples(body: AnnotationIn) -> list[list[tuple[str, int, int]]]:
    return [[(s.word, s.head, s.tail) for s in chunk] for chunk in body.selections]


def _error(status: int, code: str, detail: str = "") -> JSONResponse:
    return JSONResponse(
        status_code=status, content={"error": {"code": code, "detail": detail}}
    )


def create_app(segmenter: Segmenter, store: AnnotationStore) -> FastAPI:
    app = FastAPI(title="sandhiseg", docs_url=None, redoc_url=None)

    @app.exception_handler(RequestValidationError)
    async def _validation_handler(request: Request, exc: RequestValidationError):
        return _error(400, "bad_request", str(exc.errors()[:1]))

    @app.get("/healthz")
    def healthz() -> dict:
        return {"status": "ok"}

    @app.post("/api/segment")
    def segment(body: SegmentIn):
        try:
            return segmenter.segment(body.text)
        except EmptyInput:
            return _error(400, "empty_input", "text is empty or whitespace-only")

    def _record_from(body: AnnotationIn, record_id: str, request: Request, created: dict | None):
        selections = _selection_tuples(body)
        now = time.time()
        return {
            "id": record_id,
            "input": normalize_text(body.input),
            "selections": [
                [{"word": w, "head": h, "tail": t} for w, h, t in chunk]
                for chunk in selections
            ],
            "status": annotation_status(body.input, selections),
            "annotator": request.headers.get("x-annotator-id", "anonymous"),
            "created_at": created["created_at"] if created else now,
            "updated_at": now,
        }

    @app.post("/api/annotations", status_code=201)
    def create_annotation(body: AnnotationIn, request: Request):
        try:
            record = _record_from(body, uuid.uuid4().hex[:12], request, None)
        except EmptyInput:
            return _error(400, "empty_input", "input is empty")
        store.put(record)
        return {"id": record["id"], "status": record["status"]}

    @app.put("/api/annotations/{record_id}")
    def put_annotation(record_id: str, body: AnnotationIn, request: Request):
        try:
            record = _record_from(body, record_id, request, store.get(record_id))
        except EmptyInput:
            return _error(400, "empty_input", "input is empty")
        store.put(record)
        return {"id": record_id, "status": record["status"]}

    @app.get("/api/annotations/{record_id}")
    def get_annotation(record_id: str):
        record = store.get(record_id)
        if record is None:
            return _error(404, "not_found", record_id)
        return record

    @app.get("/api/annotations/{record_id}/export")
    def export_annotation(record_id: str):
        record = store.get(record_id)
        if record is None:
            return _error(404, "not_found", record_id)
        if record["status"] != "complete":
            return _error(409, "incomplete", "annotation does not tile every chunk")
        selections = [
            [(s["word"], s["head"], s["tail"]) for s in chunk]
            for chunk in record["selections"]
        ]
        return PlainTextResponse(export_text(selections) + "\n")

    return app


def serve(segmenter: Segmenter, store: AnnotationStore, host: str, port: int) -> None:
    import uvicorn

    uvicorn.run(create_app(segmenter, store), host=host, port=port)
