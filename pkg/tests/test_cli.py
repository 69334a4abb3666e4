import csv
import json

import pytest

from invcurv.cli import _parse_sweep, main
from invcurv.errors import PreconditionError


@pytest.fixture
def out(tmp_path, monkeypatch):
    monkeypatch.setenv("ICL_OUTPUT_DIR", str(tmp_path))
    return tmp_path


def test_critical_by_length(out):
    assert main(["critical", "--x0", "1", "--L", "4"]) == 0
    rep = json.loads((out / "critical_x0_1_L_4_report.json").read_text())
    assert rep["lambda"] == pytest.approx(1.6)
    assert rep["admissible"] is True
    curve = json.loads((out / "critical_x0_1_L_4_curve.json").read_text())
    assert len(curve["samples"]) == 4096


def test_critical_below_threshold(out, capsys):
    assert main(["critical", "--x0", "1", "--A0", "4.0"]) == 2
    assert "ThresholdViolation" in capsys.readouterr().err
    assert main(["critical", "--x0", "1", "--L", "2"]) == 2


def test_critical_by_area_with_svg(out):
    assert main(["critical", "--x0", "1", "--A0", "10", "--svg", "--format", "csv"]) == 0
    reports = list(out.glob("critical_*_report.json"))
    assert len(reports) == 1
    rep = json.loads(reports[0].read_text())
    assert rep["closed_form_round_trip_error"] < 1e-9
    svg = next(out.glob("*.svg")).read_text()
    assert 'viewBox="0 0 800 500"' in svg and 'fill-opacity="0.25"' in svg
    rows = list(csv.reader(next(out.glob("*_curve.csv")).open()))
    assert rows[0] == ["s", "x", "y"]


def test_rerun_is_byte_identical(out):
    main(["critical", "--L", "5"])
    first = {p.name: p.read_bytes() for p in out.iterdir()}
    main(["critical", "--L", "5"])
    assert first == {p.name: p.read_bytes() for p in out.iterdir()}


def test_stability_single_and_sweep(out):
    assert main(["stability", "--x0", "1", "--L", "4"]) == 0
    rep = json.loads((out / "stability_x0_1_L_4.json").read_text())
    assert rep["pass"] is True and rep["mu_w1_det"] > 1
    assert main(["stability", "--x0", "2", "--L", "8"]) == 0
    rep2 = json.loads((out / "stability_x0_2_L_8.json").read_text())
    assert rep2["mu_w1_det"] == pytest.approx(rep["mu_w1_det"], abs=1e-10)
    assert main(["stability", "--ratio-sweep", "0.05:0.2:0.05", "--format", "csv"]) == 0
    rows = list(csv.DictReader((out / "stability_sweep.csv").open()))
    assert len(rows) == 4
    assert all(float(r["mu_w1"]) > 1 and float(r["coercivity"]) > 0 for r in rows)


def test_stability_needs_length(out):
    assert main(["stability"]) == 3


def test_parse_sweep():
    assert _parse_sweep("0.01:0.05:0.01") == [0.01, 0.02, 0.03, 0.04, 0.05]
    for bad in ("1:2", "0.2:0.1:0.01", "0:1:0"):
        with pytest.raises(PreconditionError):
            _parse_sweep(bad)


def test_perturb(out):
    assert main(["perturb", "--count", "5", "--grid-n", "1024"]) == 0
    rep = json.loads((out / "perturb_plain_x0_1_L_4_seed_7.json").read_text())
    assert rep["all_positive"] is True and len(rep["rows"]) == 5
    assert main(["perturb", "--count", "3", "--grid-n", "1024", "--area-preserving",
                 "--format", "csv"]) == 0
    assert (out / "perturb_area_preserving_x0_1_L_4_seed_7.csv").exists()


def test_steiner(out):
    assert main(["steiner", "--corpus", "mixed", "--count", "8", "--seed", "2"]) == 0
    summary = json.loads((out / "steiner_mixed_8_seed_2_summary.json").read_text())
    assert summary["failures"] == 0 and summary["max_area_drift"] <= 1e-8


def test_bad_config(out):
    assert main(["critical", "--L", "4", "--grid-n", "10"]) == 3
