"""Rendered evaluation reports: JSON, per-sentence CSV, and figures."""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .metrics import EvalReport


def write_sentence_csv(report: EvalReport, path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "n_chars", "precision", "recall", "f1", "perfect"])
        for s in report.sentences:
            writer.writerow(
                [s.index, s.n_chars, f"{s.precision:.6f}", f"{s.recall:.6f}",
                 f"{s.f1:.6f}", int(s.perfect)]
            )


def plot_f1_by_length(report: EvalReport, path: Path, bucket_width: int = 10) -> None:
    buckets = sorted(report.length_buckets.items())
    xs = [f"{lo}-{lo + bucket_width - 1}" for lo, _ in buckets]
    ys = [f for _, f in buckets]
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.bar(range(len(xs)), ys, color="#4878a8")
    ax.set_xticks(range(len(xs)), xs, rotation=45, ha="right")
    ax.set_ylim(0.0, 1.05)
    ax.set_xlabel("sentence length (characters)")
    ax.set_ylabel("mean F1")
    ax.set_title("Segmentation F1 by sentence length")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_rule_metrics(report: EvalReport, path: Path) -> None:
    names = list(report.per_rule)
    if not names:
        return
    width = 0.27
    xs = range(len(names))
    fig, ax = plt.subplots(figsize=(max(6, 1.3 * len(names)), 4))
    for k, (attr, color) in enumerate(
        [("precision", "#4878a8"), ("recall", "#e1812c"), ("f1", "#3a923a")]
    ):
        vals = [getattr(report.per_rule[n], attr) for n in names]
        ax.bar([x + (k - 1) * width for x in xs], vals, width, label=attr, color=color)
    ax.set_xticks(list(xs), names, rotation=30, ha="right")
    ax.set_ylim(0.0, 1.05)
    ax.set_ylabel("score")
    ax.set_title("Per-rule character metrics")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def write_report(
    report: EvalReport, out_dir: str | Path, bucket_width: int = 10
) -> list[Path]:
    """Write report.json, per_sentence.csv and the figures; returns paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    json_path = out / "report.json"
    json_path.write_text(report.to_json() + "\n", encoding="utf-8")
    written.append(json_path)

    csv_path = out / "per_sentence.csv"
    write_sentence_csv(report, csv_path)
    written.append(csv_path)

    fig_path = out / "f1_by_length.png"
    plot_f1_by_length(report, fig_path, bucket_width)
    written.append(fig_path)

    if report.per_rule:
        rule_path = out / "rule_metrics.png"
        plot_rule_metrics(report, rule_path)
        written.append(rule_path)
    return written
