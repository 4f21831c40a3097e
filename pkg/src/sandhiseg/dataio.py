"""File formats: datasets, candidate spaces, rule tables, checkpoints.

Checkpoints are single JSON artifacts; tensors are base64 of the raw
float64 bytes so a save/load round trip is bit-identical.
"""

from __future__ import annotations

import base64
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .charlm import CharLM
from .errors import IoError
from .labels import LabelVocab
from .lattice import SandhiRule, normalize_text
from .model import EncoderConfig, EncoderParams, TokenVocab
from .toygen import ToySentence

ENCODER_FORMAT = "sandhiseg-encoder"
CHARLM_FORMAT = "sandhiseg-charlm"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class DatasetRecord:
    id: int
    input: str
    gold: str | None = None


@dataclass(frozen=True)
class LineIssue:
    line_no: int
    reason: str


def load_dataset(path: str | Path) -> tuple[list[DatasetRecord], list[LineIssue]]:
    """TSV with columns input<TAB>gold; malformed lines are reported."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read dataset {path}: {exc}") from exc
    records: list[DatasetRecord] = []
    issues: list[LineIssue] = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            issues.append(LineIssue(line_no, f"expected 2 tab-separated fields, got {len(parts)}"))
            continue
        surface = normalize_text(parts[0].strip())
        gold = normalize_text(parts[1].strip())
        if not surface:
            issues.append(LineIssue(line_no, "empty input field"))
            continue
        records.append(DatasetRecord(line_no, surface, gold or None))
    return records, issues


def write_dataset(records: Iterable[tuple[str, str]], path: str | Path) -> None:
    lines = [f"{surface}\t{gold}" for surface, gold in records]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_candidates(path: str | Path) -> dict[str, list[tuple[str, int, int]]]:
    """JSON-lines candidate space keyed by normalized input."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read candidate file {path}: {exc}") from exc
    out: dict[str, list[tuple[str, int, int]]] = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            key = normalize_text(obj["input"])
            recs = [
                (normalize_text(c["word"]), int(c["head"]), int(c["tail"]))
                for c in obj["candidates"]
            ]
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise IoError(f"{path}:{line_no}: bad candidate record: {exc}") from exc
        out[key] = recs
    return out


def write_candidates(sentences: Iterable[ToySentence], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for s in sentences:
            fh.write(
                json.dumps(
                    {
                        "input": s.surface,
                        "candidates": [
                            {"word": w, "head": h, "tail": t} for w, h, t in s.candidates
                        ],
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )


def load_rules(path: str | Path) -> list[SandhiRule]:
    """Tab-separated u, v, f, x; '#' starts a comment line."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read rule file {path}: {exc}") from exc
    rules: list[SandhiRule] = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) < 3:
            raise IoError(f"{path}:{line_no}: expected at least u, v, f columns")
        u, v, f = (normalize_text(p.strip()) for p in parts[:3])
        x = normalize_text(parts[3].strip()) if len(parts) > 3 else ""
        try:
            rules.append(SandhiRule(u=u, v=v, f=f, x=x))
        except ValueError as exc:
            raise IoError(f"{path}:{line_no}: {exc}") from exc
    return rules


def write_rules(rules: Iterable[SandhiRule], path: str | Path) -> None:
    lines = ["# u\tv\tf\tx"]
    lines += [f"{r.u}\t{r.v}\t{r.f}\t{r.x}" for r in rules]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


# --- checkpoints --------------------------------------------------------


def _encode_tensor(arr: np.ndarray) -> dict:
    data = np.ascontiguousarray(arr, dtype=np.float64)
    return {
        "shape": list(arr.shape),
        "data": base64.b64encode(data.tobytes()).decode("ascii"),
    }


def _decode_tensor(obj: dict) -> np.ndarray:
    raw = base64.b64decode(obj["data"])
    return np.frombuffer(raw, dtype=np.float64).reshape(obj["shape"]).copy()


def save_encoder(
    params: EncoderParams,
    path: str | Path,
    loss_trace: Sequence[float] | None = None,
    mode: str = "sma",
) -> None:
    cfg = params.config
    doc = {
        "format": ENCODER_FORMAT,
        "version": FORMAT_VERSION,
        "config": {
            "d_x": cfg.d_x,
            "d_z": cfg.d_z,
            "n_heads": cfg.n_heads,
            "n_layers": cfg.n_layers,
            "dropout": cfg.dropout,
            "n_max": cfg.n_max,
            "seed": cfg.seed,
        },
        "mode": mode,
        "tokens": list(params.tokens.tokens),
        "labels": list(params.labels.labels),
        "loss_trace": list(loss_trace) if loss_trace is not None else [],
        "tensors": {k: _encode_tensor(v) for k, v in params.tensors.items()},
    }
    Path(path).write_text(json.dumps(doc, ensure_ascii=False), encoding="utf-8")


def load_encoder(path: str | Path) -> tuple[EncoderParams, dict]:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise IoError(f"cannot read model checkpoint {path}: {exc}") from exc
    if doc.get("format") != ENCODER_FORMAT:
        raise IoError(f"{path} is not an encoder checkpoint")
    if doc.get("version") != FORMAT_VERSION:
        raise IoError(f"unsupported checkpoint version {doc.get('version')}")
    params = EncoderParams(
        config=EncoderConfig(**doc["config"]),
        tokens=TokenVocab(tuple(doc["tokens"])),
        labels=LabelVocab(tuple(doc["labels"])),
        tensors={k: _decode_tensor(v) for k, v in doc["tensors"].items()},
    )
    meta = {"mode": doc.get("mode", "sma"), "loss_trace": doc.get("loss_trace", [])}
    return params, meta


def save_charlm(lm: CharLM, path: str | Path) -> None:
    doc = {
        "format": CHARLM_FORMAT,
        "version": FORMAT_VERSION,
        "order": lm.order,
        "lambda": lm.lam,
        "vocab": sorted(lm.vocab),
        "counts": [
            {"context": list(ctx), "counts": counts}
            for ctx, counts in sorted(lm.counts.items())
        ],
    }
    Path(path).write_text(json.dumps(doc, ensure_ascii=False), encoding="utf-8")


def load_charlm(path: str | Path) -> CharLM:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise IoError(f"cannot read LM checkpoint {path}: {exc}") from exc
    if doc.get("format") != CHARLM_FORMAT:
        raise IoError(f"{path} is not a character-LM checkpoint")
    if doc.get("version") != FORMAT_VERSION:
        raise IoError(f"unsupported checkpoint version {doc.get('version')}")
    lm = CharLM(
        order=int(doc["order"]),
        lam=float(doc["lambda"]),
        vocab=frozenset(doc["vocab"]),
    )
    lm.counts = {tuple(e["context"]): dict(e["counts"]) for e in doc["counts"]}
    lm.context_totals = {ctx: sum(c.values()) for ctx, c in lm.counts.items()}
    return lm
