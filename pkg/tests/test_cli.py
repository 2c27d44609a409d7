import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from netclass import two_blobs
from netclass.cli import run_command
from netclass.data import write_csv


@pytest.fixture
def blobs_csv(tmp_path):
    p = tmp_path / "blobs.csv"
    write_csv(two_blobs(0), p, "cls")
    return p


@pytest.fixture
def iris_csv(tmp_path):
    datasets = pytest.importorskip("netclass.datasets")
    pytest.importorskip("sklearn")
    p = tmp_path / "iris.csv"
    write_csv(datasets.iris(), p, "species")
    return p


def _json_out(capsys):
    return json.loads(capsys.readouterr().out)


def test_crossval_iris(iris_csv, capsys):
    argv = ["crossval", "--input", str(iris_csv), "--label-col", "species", "--measure", "sssp",
            "--folds", "10", "--seed", "7"]
    assert run_command(argv) == 0
    rep = _json_out(capsys)
    assert rep["command"] == "crossval"
    assert len(rep["result"]["per_fold_accuracy"]) == 10
    assert rep["dataset"] == {"rows": 150, "columns": 4,
                              "label_histogram": {"setosa": 50, "versicolor": 50, "virginica": 50}}
    assert rep["config"]["measure"] == "sssp" and rep["config"]["seed"] == 7


def test_crossval_byte_identical(blobs_csv, tmp_path):
    outs = []
    for i in range(2):
        out = tmp_path / f"r{i}.json"
        flat = tmp_path / f"r{i}.csv"
        argv = ["crossval", "--input", str(blobs_csv), "--label-col", "cls", "--folds", "5",
                "--output", str(out), "--csv", str(flat)]
        assert run_command(argv) == 0
        outs.append((out.read_bytes(), flat.read_bytes()))
    assert outs[0] == outs[1]


def test_sensitivity_with_csv(blobs_csv, tmp_path):
    out, flat = tmp_path / "s.json", tmp_path / "s.csv"
    argv = ["sensitivity", "--input", str(blobs_csv), "--label-col", "cls", "--measure", "mst",
            "--insertions", "5", "--output", str(out), "--csv", str(flat)]
    assert run_command(argv) == 0
    rep = json.loads(out.read_text())
    assert len(rep["result"]["same_class_deltas"]) == 10
    rows = list(csv.DictReader(flat.open()))
    assert len(rows) == 20
    assert {r["insertion"] for r in rows} == {"same", "different"}


def test_bench_fields(capsys):
    assert run_command(["bench", "--size", "60", "--reps", "30", "--seed", "1"]) == 0
    rep = _json_out(capsys)
    for key in ("mst", "sssp"):
        assert {"mean", "std", "min", "max", "p25", "p50", "p75"} <= set(rep["result"][key])
    assert rep["result"]["unit"] == "ms"


def test_bench_schema_stable(capsys):
    run_command(["bench", "--size", "60", "--reps", "30", "--seed", "1"])
    a = _json_out(capsys)
    run_command(["bench", "--size", "60", "--reps", "30", "--seed", "1"])
    b = _json_out(capsys)

    def shape(d):
        return {k: shape(v) if isinstance(v, dict) else type(v).__name__ for k, v in d.items()}

    assert shape(a) == shape(b)


def test_fit_predict(blobs_csv, tmp_path, capsys):
    model = tmp_path / "m.json"
    assert run_command(["fit", "--input", str(blobs_csv), "--label-col", "cls", "--measure", "sssp",
                        "--output", str(model)]) == 0
    q = tmp_path / "q.csv"
    q.write_text("x0,x1\n1,1\n5,5\n")
    assert run_command(["predict", "--model", str(model), "--input", str(q)]) == 0
    preds = _json_out(capsys)["result"]["predictions"]
    assert [p["label"] for p in preds] == ["1", "2"]
    assert set(preds[0]["deltas"]) == {"1", "2"}
    # a query file that still carries the label column works when it is named
    assert run_command(["predict", "--model", str(model), "--input", str(blobs_csv),
                        "--label-col", "cls"]) == 0
    assert len(_json_out(capsys)["result"]["predictions"]) == 100


def test_predict_dimension_mismatch(blobs_csv, tmp_path, capsys):
    model = tmp_path / "m.json"
    run_command(["fit", "--input", str(blobs_csv), "--label-col", "cls", "--output", str(model)])
    q = tmp_path / "q.csv"
    q.write_text("a,b,c\n1,1,1\n")
    out = tmp_path / "pred.json"
    code = run_command(["predict", "--model", str(model), "--input", str(q), "--output", str(out)])
    assert code == 2
    assert "expects 2" in capsys.readouterr().err
    assert not out.exists()


def test_corrupt_model_exit_3(blobs_csv, tmp_path, capsys):
    model = tmp_path / "m.json"
    run_command(["fit", "--input", str(blobs_csv), "--label-col", "cls", "--output", str(model)])
    doc = json.loads(model.read_text())
    doc["classes"][1]["baseline_sssp"] += 1.0
    model.write_text(json.dumps(doc))
    q = tmp_path / "q.csv"
    q.write_text("x0,x1\n1,1\n")
    assert run_command(["predict", "--model", str(model), "--input", str(q)]) == 3


def test_usage_errors(capsys, blobs_csv):
    assert run_command(["frobnicate"]) == 1
    assert run_command(["crossval", "--input", str(blobs_csv), "--bogus"]) == 1
    assert run_command(["crossval", "--input", str(blobs_csv), "--label-col", "cls", "--folds", "1"]) == 1
    assert run_command(["crossval", "--input", str(blobs_csv), "--graph", "star"]) == 1
    assert "error" in capsys.readouterr().err


def test_malformed_csv_no_output(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b,y\n1,2,x\n1,oops,z\n")
    out = tmp_path / "r.json"
    code = run_command(["crossval", "--input", str(bad), "--label-col", "y", "--output", str(out)])
    assert code == 2
    assert ":3:" in capsys.readouterr().err
    assert not out.exists()
    assert list(tmp_path.iterdir()) == [bad]


def test_help_exit_zero(capsys):
    assert run_command(["--help"]) == 0


def test_console_script_module(blobs_csv):
    proc = subprocess.run(
        [sys.executable, "-m", "netclass.cli", "crossval", "--input", str(blobs_csv), "--label-col", "cls",
         "--folds", "3"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert json.loads(proc.stdout)["result"]["k"] == 3
