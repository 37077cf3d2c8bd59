import io
import json
import subprocess
import sys

import numpy as np
import pytest

from bnclassify.bif import parse_bif
from bnclassify.cli import main
from bnclassify.data import load_csv, split_holdout, to_csv


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture(scope="module")
def mushroom_files(tmp_path_factory):
    d = tmp_path_factory.mktemp("mushroom")
    ds = load_csv("data/mushroom.csv")
    tr, te = split_holdout(ds, 2 / 3, seed=0)
    (d / "mushroom-train.csv").write_text(to_csv(tr))
    (d / "mushroom-test.csv").write_text(to_csv(te))
    return d / "mushroom-train.csv", d / "mushroom-test.csv", te


@pytest.fixture(scope="module")
def adult_files(tmp_path_factory):
    d = tmp_path_factory.mktemp("adult")
    lines = load_csv("data/adult.csv.gz", continuous="auto")
    tr, te = split_holdout(lines.subset(np.arange(3000)), 2 / 3, seed=0)
    (d / "adult-train.csv").write_text(to_csv(tr))
    (d / "adult-test.csv").write_text(to_csv(te))
    return d / "adult-train.csv", d / "adult-test.csv", te


class TestEval:
    def test_vote_naive_bayes_cv(self):
        code, out, _ = run(
            "eval", "--kind", "naive-bayes", "--cv", "5", "--seed", "7", "data/vote.csv",
            "--class-column", "party", "--report-format", "json",
        )
        assert code == 0
        rec = json.loads(out)
        assert rec["accuracy"] == pytest.approx(0.8989, abs=0.03)
        assert rec["kind"] == "naive_bayes" and rec["n_test"] == 435

    def test_holdout_text_report(self, mushroom_files):
        train, test, te = mushroom_files
        code, out, _ = run("eval", "--kind", "tan", str(train), str(test))
        assert code == 0
        assert f"n_test={te.n_cases}" in out and "tan" in out

    def test_needs_test_file_or_cv(self):
        code, out, err = run("eval", "--kind", "nb", "data/car.csv")
        assert code != 0 and out == ""
        assert err.startswith("error: ") and err.count("\n") == 1


class TestTrainPredict:
    def test_gbn_round_trip(self, mushroom_files, tmp_path):
        train, test, te = mushroom_files
        model = tmp_path / "m.bif"
        assert run("train", "--kind", "gbn", "--threshold", "0.01", str(train), "-o", str(model))[0] == 0
        labels = tmp_path / "labels.txt"
        assert run("predict", str(model), str(test), "-o", str(labels))[0] == 0
        lines = labels.read_text().splitlines()
        assert len(lines) == te.n_cases
        assert set(lines) <= set(te.class_attribute.values)
        acc = np.mean([a == b for a, b in zip(lines, te.labels(te.class_index))])
        assert acc > 0.95

    def test_byte_identical_outputs(self, tmp_path):
        a, b = tmp_path / "a.bif", tmp_path / "b.bif"
        for path in (a, b):
            run("train", "--kind", "ban", "data/car.csv", "--seed", "3", "-o", str(path))
        assert a.read_bytes() == b.read_bytes()

    def test_threshold_rejected_for_tan(self):
        code, _, err = run("train", "--kind", "tan", "--threshold", "0.1", "data/car.csv")
        assert code != 0 and "threshold" in err

    def test_discretized_model_predicts_raw_numbers(self, adult_files, tmp_path):
        train, test, te = adult_files
        model = tmp_path / "a.bif"
        code, _, err = run("train", "--kind", "nb", "--discretize", "mdl", str(train), "-o", str(model))
        assert code == 0, err
        bn = parse_bif(model.read_text())
        assert any(a.cut_points for a in bn.schema)
        # the training file still holds the raw numbers; the test split has
        # categories the model never saw
        code, out, err = run("predict", str(model), str(train))
        assert code == 0, err
        assert len(out.splitlines()) == 2000
        code, _, err = run("predict", str(model), str(test))
        assert code != 0 and "unknown value" in err

    def test_continuous_columns_need_discretize(self, adult_files):
        train, _, _ = adult_files
        code, _, err = run("train", "--kind", "nb", "--schema", str(_sidecar(train)), str(train))
        assert code != 0 and "--discretize" in err

    def test_unknown_category_in_predict(self, tmp_path):
        model = tmp_path / "c.bif"
        run("train", "--kind", "nb", "data/car.csv", "-o", str(model))
        bad = tmp_path / "bad.csv"
        bad.write_text("buying,maint,doors,persons,lugboot,safety\nv-high,v-high,2,2,small,purple\n")
        code, _, err = run("predict", str(model), str(bad))
        assert code != 0 and "purple" in err


def _sidecar(train):
    path = train.parent / "schema.txt"
    path.write_text("age: continuous\nfnlwgt: continuous\n")
    return path


class TestWrapAndExport:
    def test_wrap_reports_threshold_and_winner(self, adult_files, tmp_path):
        train, _, _ = adult_files
        model = tmp_path / "w.bif"
        code, out, err = run(
            "wrap", str(train), "--grid", "0.001,0.01,0.1", "--discretize", "mdl",
            "--report-format", "json", "--model-output", str(model),
        )
        assert code == 0, err
        rec = json.loads(out)
        assert rec["threshold"] in (0.001, 0.01, 0.1)
        assert rec["kind"] in ("gbn", "ban")
        assert parse_bif(model.read_text()).structure.kind == rec["kind"]

    def test_wrap_with_test_file(self, mushroom_files):
        train, test, te = mushroom_files
        code, out, _ = run("wrap", str(train), str(test), "--grid", "0.01,0.05", "--report-format", "json")
        assert code == 0
        assert json.loads(out)["n_test"] == te.n_cases

    def test_export_describes_model(self, tmp_path):
        model = tmp_path / "c.bif"
        run("train", "--kind", "tan", "data/car.csv", "-o", str(model))
        code, out, _ = run("export", str(model), "--report-format", "json")
        info = json.loads(out)
        assert info["kind"] == "tan" and info["class"] == "y"
        assert len(info["features"]) == 6 and len(info["arcs"]) == 11
        code, text, _ = run("export", str(model))
        assert text.startswith("network car") and "y -> buying" in text


class TestErrors:
    def test_missing_file(self):
        code, out, err = run("eval", "--kind", "nb", "--cv", "5", "no/such.csv")
        assert code != 0 and out == ""
        assert err.startswith("error: ") and err.count("\n") == 1

    def test_bad_bif(self, tmp_path):
        bad = tmp_path / "bad.bif"
        bad.write_text("network n { property \"class = a\" ; }\nvariable a { type discrete [ 2 ] { x, y }; }\n"
                       "probability ( a ) { table 0.5, 0.4; }\n")
        code, _, err = run("export", str(bad))
        assert code != 0 and "line 3" in err

    def test_unknown_kind(self):
        code, _, err = run("train", "--kind", "svm", "data/car.csv")
        assert code != 0 and "svm" in err

    def test_console_script_never_dumps_a_traceback(self):
        proc = subprocess.run(
            [sys.executable, "-m", "bnclassify", "eval", "--kind", "nb", "--cv", "0", "data/car.csv"],
            capture_output=True, text=True,
        )
        assert proc.returncode != 0
        assert "Traceback" not in proc.stderr
        assert proc.stderr.startswith("error: ") and proc.stderr.count("\n") == 1
