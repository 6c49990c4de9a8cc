import json
import os

import pytest

from plotquest.cli import main
from plotquest.table import SemiStructuredTable


@pytest.fixture(scope="module")
def dataset(tmp_path_factory):
    out = tmp_path_factory.mktemp("ds")
    assert main(["generate", "--n-plots", "10", "--seed", "5", "--out", str(out)]) == 0
    return str(out)


def test_generate_layout(dataset):
    assert sorted(os.listdir(os.path.join(dataset, "plots"))) == [f"{i:04d}.svg" for i in range(10)]
    assert sorted(os.listdir(os.path.join(dataset, "annotations"))) == [f"{i:04d}.json" for i in range(10)]
    assert sorted(os.listdir(os.path.join(dataset, "tables"))) == [f"{i:04d}.csv" for i in range(10)]
    assert os.path.exists(os.path.join(dataset, "questions.jsonl"))
    with open(os.path.join(dataset, "manifest.json")) as f:
        manifest = json.load(f)
    assert manifest["config"]["seed"] == 5
    splits = manifest["splits"]
    assert sorted(splits["train"] + splits["valid"] + splits["test"]) == list(range(10))


def test_generate_reproducible(dataset, tmp_path):
    import hashlib
    out2 = tmp_path / "ds2"
    assert main(["generate", "--n-plots", "10", "--seed", "5", "--out", str(out2)]) == 0
    for name in ("manifest.json", "questions.jsonl"):
        a = open(os.path.join(dataset, name), "rb").read()
        b = open(out2 / name, "rb").read()
        assert hashlib.sha256(a).hexdigest() == hashlib.sha256(b).hexdigest()
    for i in range(10):
        a = open(os.path.join(dataset, "plots", f"{i:04d}.svg"), "rb").read()
        b = open(out2 / "plots" / f"{i:04d}.svg", "rb").read()
        assert a == b


def test_generate_rejects_zero_plots(tmp_path):
    assert main(["generate", "--n-plots", "0", "--out", str(tmp_path / "x")]) == 1


def test_generate_bad_split_is_usage_error(tmp_path):
    assert main(["generate", "--n-plots", "2", "--split", "0.5,0.5",
                 "--out", str(tmp_path / "x")]) == 1


def test_run_zero_noise_is_perfect(dataset, tmp_path):
    out = tmp_path / "run0"
    assert main(["run", "--dataset", dataset, "--noise", "zero", "--out", str(out)]) == 0
    with open(out / "report.json") as f:
        report = json.load(f)
    assert report["overall_accuracy"] == 1.0
    assert report["mean_table_f1"] == 1.0
    assert all(v == 1.0 for v in report["map"].values())
    assert os.path.exists(out / "predictions.jsonl")
    assert os.path.exists(out / "report.txt")


def test_run_drop_everything_near_zero(dataset, tmp_path):
    noise_file = tmp_path / "noise.json"
    noise_file.write_text(json.dumps({"drop_prob": 1.0, "seed": 1}))
    out = tmp_path / "run1"
    assert main(["run", "--dataset", dataset, "--noise", str(noise_file), "--out", str(out)]) == 0
    with open(out / "report.json") as f:
        report = json.load(f)
    # only style-metadata questions can survive a total detection loss
    assert report["overall_accuracy"] < 0.15


def test_run_missing_dataset_is_data_error(tmp_path):
    assert main(["run", "--dataset", str(tmp_path / "nope"), "--out", str(tmp_path / "o")]) == 2


def test_run_unknown_preset_is_usage_error(dataset, tmp_path):
    assert main(["run", "--dataset", dataset, "--noise", "bogus",
                 "--out", str(tmp_path / "o")]) == 1


def test_extract_gold_annotation_matches_gold_table(dataset, tmp_path):
    out_csv = tmp_path / "t.csv"
    ann_path = os.path.join(dataset, "annotations", "0000.json")
    assert main(["extract", "--input", ann_path, "--out", str(out_csv)]) == 0
    got = SemiStructuredTable.from_csv(out_csv.read_text())
    gold = SemiStructuredTable.from_csv(
        open(os.path.join(dataset, "tables", "0000.csv")).read())
    assert got.row_headers == gold.row_headers
    assert got.col_headers == gold.col_headers
    for grow, prow in zip(gold.cells, got.cells):
        for gv, pv in zip(grow, prow):
            assert pv is not None
            assert abs(pv - gv) <= 0.005 * abs(gv)


def test_extract_corrupted_tick_fixture(tmp_path):
    # detections with an OCR-mangled year tick reproduce the bad header
    from plotquest.detsim import Detection, DetectionSet
    dets = DetectionSet([
        Detection("ytick_label", (10, 400, 20, 12), 1.0, text="0"),
        Detection("ytick_label", (10, 100, 30, 12), 1.0, text="100"),
        Detection("xtick_label", (100, 430, 30, 12), 1.0, text="200B"),
        Detection("xtick_label", (300, 430, 30, 12), 1.0, text="2009"),
        Detection("bar", (90, 200, 40, 206), 1.0, color=0),
        Detection("bar", (290, 150, 40, 256), 1.0, color=0),
    ])
    path = tmp_path / "det.json"
    path.write_text(dets.dumps())
    out_csv = tmp_path / "out.csv"
    assert main(["extract", "--input", str(path), "--out", str(out_csv)]) == 0
    assert "200B" in out_csv.read_text()


def test_extract_empty_detections_warns(tmp_path, capsys):
    path = tmp_path / "det.json"
    path.write_text(json.dumps({"detections": []}))
    assert main(["extract", "--input", str(path)]) == 0
    captured = capsys.readouterr()
    assert "empty" in captured.err


def test_extract_missing_file(tmp_path):
    assert main(["extract", "--input", str(tmp_path / "nope.json")]) == 2


def test_evaluate_and_report_commands(dataset, tmp_path):
    run_out = tmp_path / "run"
    assert main(["run", "--dataset", dataset, "--noise", "zero", "--out", str(run_out)]) == 0
    assert main(["evaluate", "--predictions", str(run_out / "predictions.jsonl"),
                 "--out", str(tmp_path / "rescored.json")]) == 0
    with open(tmp_path / "rescored.json") as f:
        assert json.load(f)["overall_accuracy"] == 1.0
    assert main(["report", "--report", str(run_out / "report.json")]) == 0


def test_usage_error_on_unknown_command():
    assert main(["frobnicate"]) == 1
