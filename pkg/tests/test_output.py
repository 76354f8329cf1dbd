import csv
import json
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from markovgap import ensemble as E
from markovgap import output

SVG = "{http://www.w3.org/2000/svg}"


def test_fmt():
    assert output.fmt(0.1 + 0.2) == "0.3"
    assert output.fmt(1 / 3) == "0.333333333333"
    assert output.fmt(np.int64(7)) == "7"
    assert output.fmt(True) == "1"
    assert output.fmt(float("nan")) == "nan"
    assert output.fmt(None) == ""


def test_empty_records_give_header_only(tmp_path):
    cfg = E.SweepConfig(((1, 1, 1),), 1, ("entropy", "markov_gap"), 3, str(tmp_path / "out"))
    paths = output.write_outputs([], cfg)
    lines = open(paths["csv"]).read().splitlines()
    assert len(lines) == 1
    assert lines[0].split(",")[:3] == ["n_a", "n_b", "n_c"]
    manifest = json.load(open(paths["manifest"]))
    assert manifest["master_seed"] == 3 and manifest["points"] == 0 and not manifest["partial"]
    assert manifest["version"] == "0.1.0"


def test_csv_columns_and_manifest(tmp_path):
    cfg = E.SweepConfig(((1, 1, 1), (6, 6, 1)), 4, ("ppt_fraction", "markov_gap"), 3, str(tmp_path),
                        experiment_id=0)
    recs = E.run_sweep(cfg)
    paths = output.write_outputs(recs, cfg, wall_time=1.5)
    rows = list(csv.DictReader(open(paths["csv"])))
    assert rows[0]["status"] == "ok" and rows[1]["status"] == "capacity"
    assert int(rows[0]["ppt_count"]) + int(rows[0]["npt_count"]) == 4
    assert rows[0]["markov_gap_regime"] == "ES"
    assert float(rows[0]["markov_gap_analytic"]) == pytest.approx(np.log(2))
    assert rows[0]["seed_path"] == "3/0/0"
    manifest = json.load(open(paths["manifest"]))
    assert manifest["partial"] and manifest["failures"][0]["point"] == [6, 6, 1]
    assert manifest["wall_time_s"] == 1.5


def test_svg_matches_grid(tmp_path):
    grid = tuple(E.phase_diagram_grid(3, 4))
    cfg = E.SweepConfig(grid, 2, ("entropy",), 1, str(tmp_path), emit_svg=True)
    recs = E.run_sweep(cfg)
    paths = output.write_outputs(recs, cfg)
    root = ET.parse(paths["entropy.svg"]).getroot()
    rects = root.findall(f"{SVG}rect")
    xs = {r.get("data-x") for r in rects}
    ys = {r.get("data-y") for r in rects}
    assert int(root.get("data-cols")) == len(xs) == 2
    assert int(root.get("data-rows")) == len(ys) == 4
    assert len(rects) == len(grid)
    assert int(root.get("width")) == 2 * output.MARGIN + output.CELL * 2
    values = sorted(float(r.get("data-value")) for r in rects)
    assert values == pytest.approx(sorted(r.stats["entropy"].mean for r in recs), abs=1e-11)
    assert "entropy_analytic.svg" in paths


def test_histogram_json(tmp_path):
    cfg = E.SweepConfig(((1, 1, 1),), 3, ("pt_spectrum_histogram",), 0, str(tmp_path))
    paths = output.write_outputs(E.run_sweep(cfg), cfg)
    data = json.load(open(paths["histograms"]))
    assert data["bins"] == E.HIST_BINS
    assert sum(data["points"][0]["counts"]) == 3 * 4


def test_unwritable_path_reports_path(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    cfg = E.SweepConfig(((1, 1, 1),), 1, ("entropy",), 0, str(blocker / "sub"))
    with pytest.raises(OSError, match="sub"):
        output.write_outputs([], cfg)
