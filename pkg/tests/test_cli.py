import csv

import pytest
import yaml

from cedbench import cli, dataset_io, metrics, pipeline
from cedbench.noise import uniform_from_accuracy
from cedbench.simulator import default_config_text


def run(*argv):
    return cli.main([str(a) for a in argv])


@pytest.fixture
def generated(tmp_path):
    path = tmp_path / "test.jsonl"
    assert run("generate", "--n", 200, "--seed", 7, "--out", path) == 0
    return path


def test_generate_writes_n_lines(tmp_path):
    path = tmp_path / "t.jsonl"
    assert run("generate", "--n", 1000, "--out", path) == 0
    assert path.read_text().count("\n") == 1000


def test_generate_is_deterministic(tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    run("generate", "--n", 1, "--seed", 3, "--out", a)
    run("generate", "--n", 1, "--seed", 3, "--out", b)
    assert a.read_bytes() == b.read_bytes()


def test_generate_with_workers_matches_sequential(tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    run("generate", "--n", 100, "--out", a)
    run("generate", "--n", 100, "--workers", 2, "--out", b)
    assert a.read_bytes() == b.read_bytes()


def test_generate_rejects_bad_config(tmp_path, capsys):
    data = yaml.safe_load(default_config_text())
    data["stages"][1]["activities"][0]["p"] = 0.17  # daytime sums to 0.9
    cfg = tmp_path / "bad.yaml"
    cfg.write_text(yaml.safe_dump(data))
    assert run("generate", "--config", cfg, "--n", 5, "--out", tmp_path / "x.jsonl") == cli.EXIT_CONFIG
    assert "sum to" in capsys.readouterr().err


def test_generate_uses_config_file(tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text(default_config_text())
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    run("generate", "--config", cfg, "--n", 20, "--out", a)
    run("generate", "--n", 20, "--out", b)
    assert a.read_bytes() == b.read_bytes()


def test_perturb_perfect_accuracy(generated, tmp_path):
    out = tmp_path / "n.jsonl"
    assert run("perturb", "--in", generated, "--accuracy", 1.0, "--out", out) == 0
    for r in dataset_io.read_dataset(out):
        assert r.ae_observed == r.ae_true


def test_perturb_default_accuracy(generated, tmp_path):
    out = tmp_path / "n.jsonl"
    run("perturb", "--in", generated, "--seed", 4, "--out", out)
    recs = dataset_io.read_dataset(generated)
    expected = pipeline.perturb_records(recs, uniform_from_accuracy(0.91), 4)
    got = dataset_io.read_dataset(out)
    assert got == expected
    assert [r.ce_labels for r in got] == [r.ce_labels for r in recs]


def test_perturb_rejects_non_stochastic_matrix(generated, tmp_path, capsys):
    m = tmp_path / "m.txt"
    rows = ["1 0 0 0 0 0 0 0 0"] * 9
    rows[2] = "0.2 0.2 0.2 0 0 0 0 0 0"
    m.write_text("\n".join(rows))
    assert run("perturb", "--in", generated, "--matrix", m, "--out", tmp_path / "x") == cli.EXIT_VALIDATION
    assert "row 2" in capsys.readouterr().err


def test_perturb_with_matrix_file(generated, tmp_path):
    m = tmp_path / "m.txt"
    m.write_text("\n".join(" ".join("1" if i == j else "0" for j in range(9)) for i in range(9)))
    out = tmp_path / "n.jsonl"
    assert run("perturb", "--in", generated, "--matrix", m, "--out", out) == 0
    assert all(r.ae_observed == r.ae_true for r in dataset_io.read_dataset(out))


def test_detect_clean_equals_truth(generated, tmp_path, caplog):
    pred = tmp_path / "p.jsonl"
    with caplog.at_level("WARNING"):
        assert run("detect", "--in", generated, "--out", pred) == 0
    assert "lack ae_observed" in caplog.text
    truth = dataset_io.read_dataset(generated)
    preds = dataset_io.read_predictions(pred)
    assert [p.ce_pred for p in preds] == [r.ce_labels for r in truth]


def test_detect_empty_dataset(tmp_path):
    src, out = tmp_path / "e.jsonl", tmp_path / "p.jsonl"
    src.write_text("")
    assert run("detect", "--in", src, "--out", out) == 0
    assert out.read_text() == ""


def test_evaluate_perfect(generated, tmp_path):
    pred, rep = tmp_path / "p.jsonl", tmp_path / "r.csv"
    run("detect", "--in", generated, "--out", pred)
    assert run("evaluate", "--in", generated, "--pred", pred, "--out", rep) == 0
    rows = metrics.read_report(rep)
    assert all(r["precision"] == r["recall"] == r["f1"] == 1.0 for r in rows)


def test_evaluate_all_empty_predictor(generated, tmp_path):
    truth = dataset_io.read_dataset(generated)
    pred = tmp_path / "p.jsonl"
    dataset_io.write_predictions(
        [dataset_io.PredictionRecord(r.example_id, (frozenset(),) * len(r.ae_true)) for r in truth], pred
    )
    rep = tmp_path / "r.csv"
    run("evaluate", "--in", generated, "--pred", pred, "--out", rep)
    rows = {r["class"]: r for r in metrics.read_report(rep)}
    assert rows["avg"]["f1"] == pytest.approx(0.25, abs=0.01)
    assert rows["pos"]["f1"] == 0


def test_evaluate_multiple_runs_fills_ci(generated, tmp_path):
    preds = []
    for s in range(10):
        noisy, pred = tmp_path / f"n{s}.jsonl", tmp_path / f"p{s}.jsonl"
        run("perturb", "--in", generated, "--seed", s, "--out", noisy)
        run("detect", "--in", noisy, "--out", pred)
        preds.append(pred)
    rep = tmp_path / "r.csv"
    assert run("evaluate", "--in", generated, "--pred", *preds, "--out", rep) == 0
    rows = metrics.read_report(rep)
    assert all(r["runs"] == 10 for r in rows)
    assert any(r["f1_ci"] > 0 for r in rows)
    # internal-perturbation form gives the same numbers
    rep2 = tmp_path / "r2.csv"
    assert run("evaluate", "--in", generated, "--runs", 10, "--seed", 0, "--out", rep2) == 0
    assert rep.read_text() == rep2.read_text()


def test_evaluate_mismatched_files(generated, tmp_path):
    other = tmp_path / "o.jsonl"
    run("generate", "--n", 50, "--out", other)
    pred = tmp_path / "p.jsonl"
    run("detect", "--in", other, "--out", pred)
    assert run("evaluate", "--in", generated, "--pred", pred, "--out", tmp_path / "r.csv") == cli.EXIT_VALIDATION


def test_missing_input_is_io_error(tmp_path):
    assert run("detect", "--in", tmp_path / "nope.jsonl", "--out", tmp_path / "p") == cli.EXIT_IO


def test_sweep_perfect_row(generated, tmp_path):
    out = tmp_path / "s.csv"
    assert run("sweep", "--in", generated, "--accuracy", 1.0, "--runs", 2, "--out", out) == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 1
    assert float(rows[0]["f1_all"]) == 1.0 and float(rows[0]["f1_pos"]) == 1.0


def test_sweep_point_equals_manual_pipeline(generated, tmp_path):
    sweep_out = tmp_path / "s.csv"
    run("sweep", "--in", generated, "--accuracy", 0.91, "--runs", 1, "--seed", 5, "--out", sweep_out)
    noisy, pred, rep = tmp_path / "n.jsonl", tmp_path / "p.jsonl", tmp_path / "r.csv"
    run("perturb", "--in", generated, "--accuracy", 0.91, "--seed", 5, "--out", noisy)
    run("detect", "--in", noisy, "--out", pred)
    run("evaluate", "--in", generated, "--pred", pred, "--out", rep)
    row = next(csv.DictReader(sweep_out.open()))
    manual = {r["class"]: r for r in metrics.read_report(rep)}
    for cls in ("e0", "e1", "e2", "e3"):
        for m in ("precision", "recall", "f1"):
            assert float(row[f"{m}_{cls}"]) == manual[cls][m]
    assert float(row["f1_all"]) == manual["avg"]["f1"]
    assert float(row["f1_pos"]) == manual["pos"]["f1"]


def test_sweep_rejects_bad_accuracy(generated, tmp_path):
    assert run("sweep", "--in", generated, "--accuracy", 1.5, "--out", tmp_path / "s") == cli.EXIT_CONFIG


def test_runs_must_be_positive(generated, tmp_path):
    assert run("sweep", "--in", generated, "--runs", 0, "--out", tmp_path / "s") == cli.EXIT_USAGE
