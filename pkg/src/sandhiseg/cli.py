"""Command-line interface.

Subcommands: train, eval, predict, rectify, serve, gen-toy.
Exit codes: 0 on success, 2 on usage errors, 1 on runtime failures.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields as dataclass_fields
from pathlib import Path

from . import dataio
from .charlm import DEFAULT_LAMBDA, DEFAULT_ORDER, train_charlm
from .errors import AlignmentMismatch, SandhisegError
from .labels import partition_gold_words
from .lattice import normalize_text
from .metrics import evaluate
from .model import EncoderConfig
from .prcp import prcp_rectify
from .report import write_report
from .service import AnnotationStore, Segmenter
from .toygen import DEFAULT_RULES, generate_corpus
from .train import TrainConfig, train, training_perfect_match

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib


def _load_config(path: str | None, seed: int | None):
    """TOML key/value config split across training and model fields."""
    raw: dict = {}
    if path:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    train_keys = {f.name for f in dataclass_fields(TrainConfig)}
    model_keys = {f.name for f in dataclass_fields(EncoderConfig)}
    train_kwargs = {k: v for k, v in raw.items() if k in train_keys}
    model_kwargs = {k: v for k, v in raw.items() if k in model_keys and k != "dropout"}
    if seed is not None:
        train_kwargs["seed"] = seed
        model_kwargs["seed"] = seed
    return TrainConfig(**train_kwargs), EncoderConfig(**model_kwargs)


def _make_segmenter(args) -> Segmenter:
    params, meta = dataio.load_encoder(args.model)
    lm = dataio.load_charlm(args.lm) if getattr(args, "lm", None) else None
    use_prcp = not getattr(args, "no_prcp", False) and lm is not None
    candidates = dataio.load_candidates(args.candidates) if args.candidates else {}
    aux = getattr(args, "aux_source", "auto")
    rules = ()
    if aux == "rules":
        if not getattr(args, "rules", None):
            raise SandhisegError("--aux-source rules requires --rules")
        rules = tuple(dataio.load_rules(args.rules))
    return Segmenter(
        params=params,
        lm=lm,
        mode=getattr(args, "mode", None) or meta.get("mode", "sma"),
        n_max=args.ngram_max,
        use_prcp=use_prcp,
        candidates=candidates,
        aux_source=aux,
        rules=rules,
    )


def _read_lines(path: str) -> list[str]:
    return [
        normalize_text(line.strip())
        for line in Path(path).read_text(encoding="utf-8").splitlines()
        if line.strip()
    ]


def cmd_train(args) -> int:
    records, issues = dataio.load_dataset(args.dataset)
    for issue in issues:
        print(f"warning: line {issue.line_no}: {issue.reason}", file=sys.stderr)
    pairs = [(r.input, r.gold) for r in records if r.gold]
    train_cfg, model_cfg = _load_config(args.config, args.seed)
    candidates = dataio.load_candidates(args.candidates) if args.candidates else {}
    rules = ()
    if args.aux_source == "rules":
        if not args.rules:
            print("error: --aux-source rules requires --rules", file=sys.stderr)
            return 2
        rules = tuple(dataio.load_rules(args.rules))

    def lattice_source(text: str):
        from .lattice import ingest_candidate_space, ngram_lattice, rule_lattice

        if args.aux_source == "ngram":
            return ngram_lattice(text, args.ngram_max)
        if args.aux_source == "rules":
            return rule_lattice(text, rules)
        if args.aux_source == "none":
            return ingest_candidate_space(text, [])
        recs = candidates.get(text)
        if recs:
            return ingest_candidate_space(text, recs)
        return ngram_lattice(text, args.ngram_max)

    result = train(pairs, lattice_source, train_cfg, model_cfg, mode=args.mode)
    dataio.save_encoder(result.params, args.model, result.loss_trace, mode=args.mode)
    print(f"trained on {result.n_used} sentences ({result.n_excluded} excluded)")
    if result.loss_trace:
        print(f"final loss {result.loss_trace[-1]:.6f}")
    if args.lm:
        lm = train_charlm([g for _, g in pairs], order=args.lm_order, lam=args.lm_lambda)
        dataio.save_charlm(lm, args.lm)
        print(f"character LM saved to {args.lm}")
    pm = training_perfect_match(result, pairs, lattice_source)
    print(f"training-set PM={pm:.1f}")
    return 0


def cmd_eval(args) -> int:
    records, issues = dataio.load_dataset(args.dataset)
    for issue in issues:
        print(f"warning: line {issue.line_no}: {issue.reason}", file=sys.stderr)
    golds = [r.gold for r in records if r.gold]
    surfaces = [r.input for r in records if r.gold]
    if args.pred:
        preds = _read_lines(args.pred)
        if len(preds) != len(golds):
            print(
                f"error: {len(preds)} predictions for {len(golds)} gold sentences",
                file=sys.stderr,
            )
            return 1
    else:
        if not args.model:
            print("error: eval needs --pred or --model", file=sys.stderr)
            return 2
        seg = _make_segmenter(args)
        preds = []
        for text in surfaces:
            chunks = seg.segment(text)["chunks"]
            preds.append(" ".join(" ".join(c["prediction"]) for c in chunks))
    rules = dataio.load_rules(args.rules) if args.rules else None
    report = evaluate(golds, preds, surfaces, rules, bucket_width=args.bucket_width)
    print(f"P={100.0 * report.precision:.2f}")
    print(f"R={100.0 * report.recall:.2f}")
    print(f"F={100.0 * report.f1:.2f}")
    print(f"PM={report.perfect_match:.1f}")
    if args.out_dir:
        for path in write_report(report, args.out_dir, bucket_width=args.bucket_width):
            print(f"wrote {path}")
    return 0


def cmd_predict(args) -> int:
    seg = _make_segmenter(args)
    records, _ = dataio.load_dataset(args.dataset)
    lines = []
    for r in records:
        chunks = seg.segment(r.input)["chunks"]
        lines.append(" ".join(" ".join(c["prediction"]) for c in chunks))
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_rectify(args) -> int:
    seg = _make_segmenter(args)
    if seg.lm is None:
        print("error: rectify requires --lm", file=sys.stderr)
        return 2
    records, _ = dataio.load_dataset(args.dataset)
    preds = _read_lines(args.pred)
    if len(preds) != len(records):
        print("error: prediction and dataset line counts differ", file=sys.stderr)
        return 1
    out_lines: list[str] = []
    diag_lines: list[str] = []
    n_activated = 0
    for r, pred in zip(records, preds):
        lattice = seg.lattice_for(r.input)
        try:
            groups = partition_gold_words(list(lattice.chunks), pred.split())
        except AlignmentMismatch:
            out_lines.append(pred)
            diag_lines.append(json.dumps({"id": r.id, "error": "unalignable prediction"}))
            continue
        result = prcp_rectify(
            [" ".join(g) for g in groups], lattice, seg.params, seg.lm, mode=seg.mode
        )
        out_lines.append(result.text)
        if any(a.replaced for a in result.actions):
            n_activated += 1
        diag_lines.append(
            json.dumps(
                {
                    "id": r.id,
                    "corrupted_chunks": [a.chunk_index for a in result.actions if a.corrupted],
                    "replaced_chunks": [a.chunk_index for a in result.actions if a.replaced],
                    "path_counts": {
                        str(a.chunk_index): a.n_paths for a in result.actions if a.corrupted
                    },
                    "chosen_scores": {
                        str(a.chunk_index): a.chosen_score
                        for a in result.actions
                        if a.replaced
                    },
                    "truncated": [a.chunk_index for a in result.actions if a.truncated],
                },
                ensure_ascii=False,
            )
        )
    text = "\n".join(out_lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if args.diagnostics:
        Path(args.diagnostics).write_text("\n".join(diag_lines) + "\n", encoding="utf-8")
    print(
        f"rectification activated for {n_activated} of {len(records)} sentences",
        file=sys.stderr,
    )
    return 0


def cmd_serve(args) -> int:
    from .service import serve

    seg = _make_segmenter(args)
    store = AnnotationStore(args.annotations)
    serve(seg, store, args.host, args.port)
    return 0


def cmd_gen_toy(args) -> int:
    sentences = generate_corpus(args.n, seed=args.seed)
    dataio.write_dataset(((s.surface, s.gold) for s in sentences), args.out)
    print(f"wrote {args.n} sentences to {args.out}")
    if args.candidates:
        dataio.write_candidates(sentences, args.candidates)
        print(f"wrote candidate space to {args.candidates}")
    if args.rules:
        dataio.write_rules(DEFAULT_RULES, args.rules)
        print(f"wrote rewrite rules to {args.rules}")
    return 0


def _add_lattice_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--candidates", help="candidate-space JSONL file")
    p.add_argument("--ngram-max", type=int, default=4, help="fallback n-gram order")
    p.add_argument(
        "--aux-source",
        choices=["auto", "ngram", "rules", "none"],
        default="auto",
        help="auxiliary-node source: candidate file when available (auto), "
        "n-grams, rewrite-rule nodes, or characters only",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sandhiseg",
        description="Lattice-based segmentation of sandhi-fused text",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train the encoder (and optionally the char LM)")
    p.add_argument("--dataset", required=True, help="TSV: input<TAB>gold")
    p.add_argument("--model", required=True, help="output checkpoint path")
    p.add_argument("--lm", help="output character-LM checkpoint path")
    p.add_argument("--lm-order", type=int, default=DEFAULT_ORDER)
    p.add_argument("--lm-lambda", type=float, default=DEFAULT_LAMBDA)
    p.add_argument("--mode", choices=["sma", "vanilla"], default="sma")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--config", help="TOML file mirroring the training config")
    p.add_argument("--rules", help="rule table (needed for --aux-source rules)")
    _add_lattice_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="score predictions against gold")
    p.add_argument("--dataset", required=True)
    p.add_argument("--pred", help="predictions file, one segmentation per line")
    p.add_argument("--model", help="model checkpoint (used when --pred is absent)")
    p.add_argument("--lm", help="character-LM checkpoint for rectification")
    p.add_argument("--mode", choices=["sma", "vanilla"], default=None)
    p.add_argument("--no-prcp", action="store_true")
    p.add_argument("--rules", help="rule table for per-rule metrics")
    p.add_argument("--out-dir", help="write report.json, CSV and figures here")
    p.add_argument("--bucket-width", type=int, default=10)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--config", help="unused; accepted for symmetry")
    _add_lattice_flags(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("predict", help="segment raw inputs")
    p.add_argument("--model", required=True)
    p.add_argument("--dataset", required=True, help="TSV or plain inputs")
    p.add_argument("--lm", help="character-LM checkpoint for rectification")
    p.add_argument("--mode", choices=["sma", "vanilla"], default=None)
    p.add_argument("--no-prcp", action="store_true")
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--rules", help="rule table (needed for --aux-source rules)")
    p.add_argument("--seed", type=int, default=None)
    _add_lattice_flags(p)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("rectify", help="repair out-of-lattice predictions")
    p.add_argument("--model", required=True)
    p.add_argument("--lm", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--diagnostics", help="JSON-lines per-sentence diagnostics")
    p.add_argument("--mode", choices=["sma", "vanilla"], default=None)
    p.add_argument("--rules", help="rule table (needed for --aux-source rules)")
    p.add_argument("--seed", type=int, default=None)
    _add_lattice_flags(p)
    p.set_defaults(func=cmd_rectify)

    p = sub.add_parser("serve", help="run the HTTP API")
    p.add_argument("--model", required=True)
    p.add_argument("--lm", help="character-LM checkpoint for rectification")
    p.add_argument("--annotations", default="annotations.jsonl")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--mode", choices=["sma", "vanilla"], default=None)
    p.add_argument("--no-prcp", action="store_true")
    p.add_argument("--rules", help="rule table (needed for --aux-source rules)")
    p.add_argument("--seed", type=int, default=None)
    _add_lattice_flags(p)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("gen-toy", help="generate a synthetic sandhi corpus")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output TSV path")
    p.add_argument("--candidates", help="also write the candidate space JSONL")
    p.add_argument("--rules", help="also write the rewrite-rule table")
    p.set_defaults(func=cmd_gen_toy)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SandhisegError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
