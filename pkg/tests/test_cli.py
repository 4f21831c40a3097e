"""End-to-end command-line flows."""

import json

import pytest

from sandhiseg import dataio
from sandhiseg.cli import main


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    """A toy corpus plus a small trained model and LM."""
    root = tmp_path_factory.mktemp("cli")
    data = root / "toy.tsv"
    cands = root / "cands.jsonl"
    rules = root / "rules.tsv"
    assert main([
        "gen-toy", "--n", "20", "--seed", "3",
        "--out", str(data), "--candidates", str(cands), "--rules", str(rules),
    ]) == 0
    model = root / "model.json"
    lm = root / "lm.json"
    cfg = root / "train.toml"
    cfg.write_text(
        "epochs = 6\nlearning_rate = 0.003\ndropout = 0.1\nbatch_size = 2\n"
        "d_x = 16\nd_z = 16\n",
        encoding="utf-8",
    )
    assert main([
        "train", "--dataset", str(data), "--model", str(model), "--lm", str(lm),
        "--config", str(cfg), "--seed", "1",
    ]) == 0
    return {"root": root, "data": data, "cands": cands, "rules": rules,
            "model": model, "lm": lm}


class TestGenToy:
    def test_record_count_and_validity(self, workdir):
        records, issues = dataio.load_dataset(workdir["data"])
        assert len(records) == 20 and not issues
        from sandhiseg.labels import decode_labels, sentence_labels

        for r in records:
            assert decode_labels(sentence_labels(r.input, r.gold)) == r.gold


class TestEval:
    def test_pred_equals_gold_prints_pm_100(self, workdir, capsys):
        pred = workdir["root"] / "gold_pred.txt"
        records, _ = dataio.load_dataset(workdir["data"])
        pred.write_text("\n".join(r.gold for r in records) + "\n", encoding="utf-8")
        rc = main([
            "eval", "--dataset", str(workdir["data"]), "--pred", str(pred),
        ])
        out = capsys.readouterr().out
        assert rc == 0
        assert "PM=100.0" in out

    def test_report_files_written(self, workdir, capsys):
        pred = workdir["root"] / "gold_pred2.txt"
        records, _ = dataio.load_dataset(workdir["data"])
        pred.write_text("\n".join(r.gold for r in records) + "\n", encoding="utf-8")
        out_dir = workdir["root"] / "report"
        rc = main([
            "eval", "--dataset", str(workdir["data"]), "--pred", str(pred),
            "--rules", str(workdir["rules"]), "--out-dir", str(out_dir),
        ])
        assert rc == 0
        report = json.loads((out_dir / "report.json").read_text(encoding="utf-8"))
        assert report["perfect_match"] == 100.0
        assert (out_dir / "per_sentence.csv").exists()
        assert (out_dir / "f1_by_length.png").stat().st_size > 0
        assert (out_dir / "rule_metrics.png").stat().st_size > 0

    def test_model_based_eval_runs(self, workdir, capsys):
        rc = main([
            "eval", "--dataset", str(workdir["data"]), "--model", str(workdir["model"]),
            "--lm", str(workdir["lm"]), "--candidates", str(workdir["cands"]),
        ])
        assert rc == 0
        assert "PM=" in capsys.readouterr().out


class TestPredict:
    def test_writes_one_line_per_input(self, workdir):
        out = workdir["root"] / "pred.txt"
        rc = main([
            "predict", "--model", str(workdir["model"]), "--lm", str(workdir["lm"]),
            "--dataset", str(workdir["data"]), "--out", str(out),
        ])
        assert rc == 0
        records, _ = dataio.load_dataset(workdir["data"])
        lines = out.read_text(encoding="utf-8").splitlines()
        assert len(lines) == len(records)

    def test_missing_model_flag_exits_2(self, workdir, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["predict", "--dataset", str(workdir["data"])])
        assert exc.value.code == 2

    def test_unknown_flag_exits_2(self, workdir):
        with pytest.raises(SystemExit) as exc:
            main(["predict", "--bogus"])
        assert exc.value.code == 2


class TestAuxSources:
    @pytest.mark.parametrize("aux", ["ngram", "none"])
    def test_predict_with_alternate_sources(self, workdir, aux):
        out = workdir["root"] / f"pred_{aux}.txt"
        rc = main([
            "predict", "--model", str(workdir["model"]), "--lm", str(workdir["lm"]),
            "--dataset", str(workdir["data"]), "--out", str(out),
            "--aux-source", aux,
        ])
        assert rc == 0
        records, _ = dataio.load_dataset(workdir["data"])
        assert len(out.read_text(encoding="utf-8").splitlines()) == len(records)

    def test_predict_with_rule_nodes(self, workdir):
        out = workdir["root"] / "pred_rules.txt"
        rc = main([
            "predict", "--model", str(workdir["model"]), "--lm", str(workdir["lm"]),
            "--dataset", str(workdir["data"]), "--out", str(out),
            "--aux-source", "rules", "--rules", str(workdir["rules"]),
        ])
        assert rc == 0

    def test_rules_source_requires_rule_table(self, workdir, capsys):
        rc = main([
            "predict", "--model", str(workdir["model"]),
            "--dataset", str(workdir["data"]), "--aux-source", "rules",
        ])
        assert rc == 1
        assert "--rules" in capsys.readouterr().err


class TestRectify:
    def test_corrupted_word_replaced(self, workdir, capsys):
        records, _ = dataio.load_dataset(workdir["data"])
        target = records[0]
        corrupted = target.gold.split()
        corrupted[0] = corrupted[0] + "zz"
        pred = workdir["root"] / "corrupt.txt"
        pred.write_text(
            "\n".join([" ".join(corrupted)] + [r.gold for r in records[1:]]) + "\n",
            encoding="utf-8",
        )
        out = workdir["root"] / "fixed.txt"
        diag = workdir["root"] / "diag.jsonl"
        rc = main([
            "rectify", "--model", str(workdir["model"]), "--lm", str(workdir["lm"]),
            "--dataset", str(workdir["data"]), "--pred", str(pred),
            "--candidates", str(workdir["cands"]),
            "--out", str(out), "--diagnostics", str(diag),
        ])
        assert rc == 0
        first_diag = json.loads(diag.read_text(encoding="utf-8").splitlines()[0])
        assert first_diag["corrupted_chunks"]
        fixed_first = out.read_text(encoding="utf-8").splitlines()[0]
        assert "zz" not in fixed_first
        assert "rectification activated for" in capsys.readouterr().err
