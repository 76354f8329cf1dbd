"""CSV, JSON manifest and SVG heatmap writers for sweep records."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import platform
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from . import __version__
from .ensemble import QUANTITIES, SweepRecord

CELL = 40
MARGIN = 60


def fmt(x) -> str:
    """12 significant digits, locale-free; empty for missing values."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".12g")


def csv_header(quantities: Sequence[str]) -> list[str]:
    head = ["n_a", "n_b", "n_c", "phase", "boundary", "status", "samples", "seed_path"]
    for q in (q for q in QUANTITIES if q in quantities):
        head += [f"{q}_mean", f"{q}_stderr", f"{q}_min", f"{q}_max", f"{q}_analytic", f"{q}_regime"]
        if q == "ppt_fraction":
            head += ["ppt_count", "npt_count"]
    return head


def csv_text(records: Sequence[SweepRecord], quantities: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(csv_header(quantities))
    for rec in records:
        row = [*rec.point, rec.phase.label, fmt(rec.phase.boundary), rec.status, rec.samples,
               "/".join(str(p) for p in rec.seed_path)]
        for q in (q for q in QUANTITIES if q in quantities):
            st = rec.stats.get(q)
            pred = rec.predictions.get(q)
            row += [fmt(st.mean) if st else "", fmt(st.stderr) if st else "",
                    fmt(st.min) if st else "", fmt(st.max) if st else "",
                    fmt(pred.value) if pred else "", pred.regime if pred else ""]
            if q == "ppt_fraction":
                row += [fmt(rec.ppt_count), fmt(rec.npt_count)]
        w.writerow(row)
    return buf.getvalue()


def _open_for_write(path: str, mode: str = "w"):
    try:
        return open(path, mode, encoding="utf-8", newline="")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc


def write_csv(path: str, records: Sequence[SweepRecord], quantities: Sequence[str]) -> str:
    with _open_for_write(path) as fh:
        fh.write(csv_text(records, quantities))
    return path


def write_manifest(path: str, config: dict, master_seed: int, wall_time: float,
                   records: Sequence[SweepRecord] = (), extra: dict | None = None) -> str:
    manifest = {
        "tool": "markovgap",
        "version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "master_seed": int(master_seed),
        "wall_time_s": round(float(wall_time), 3),
        "config": config,
        "points": len(records),
        "partial": any(r.status != "ok" for r in records),
        "failures": [{"point": list(r.point), "status": r.status, "message": r.message}
                     for r in records if r.status != "ok"],
    }
    if extra:
        manifest.update(extra)
    with _open_for_write(path) as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")
    return path


def _json_default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, tuple):
        return list(o)
    raise TypeError(f"not serialisable: {type(o).__name__}")


def write_histograms(path: str, records: Sequence[SweepRecord], bins: int, value_range) -> str:
    data = {
        "bins": bins,
        "range": list(value_range),
        "scale": "eigenvalue * D_AB",
        "points": [{"point": list(r.point), "counts": r.histogram.tolist()}
                   for r in records if r.histogram is not None],
    }
    with _open_for_write(path) as fh:
        json.dump(data, fh, indent=2)
        fh.write("\n")
    return path


# --------------------------------------------------------------------------
# SVG heatmaps


def _color(t: float) -> str:
    # linear blue -> yellow scale
    if not math.isfinite(t):
        return "#cccccc"
    t = min(max(t, 0.0), 1.0)
    r = int(round(30 + t * (250 - 30)))
    g = int(round(60 + t * (220 - 60)))
    b = int(round(160 + t * (40 - 160)))
    return f"#{r:02x}{g:02x}{b:02x}"


def heatmap_svg(cells: dict[tuple[float, float], float], title: str,
                x_label: str = "N_A/N_AB", y_label: str = "N_C/N") -> str:
    """Heatmap with one ``rect`` per cell; column/row counts are stored on the root element."""
    xs = sorted({k[0] for k in cells})
    ys = sorted({k[1] for k in cells})
    vals = [v for v in cells.values() if math.isfinite(v)]
    vmin, vmax = (min(vals), max(vals)) if vals else (0.0, 1.0)
    span = vmax - vmin if vmax > vmin else 1.0
    width = 2 * MARGIN + CELL * len(xs)
    height = 2 * MARGIN + CELL * len(ys)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'data-cols="{len(xs)}" data-rows="{len(ys)}" data-vmin="{fmt(vmin)}" data-vmax="{fmt(vmax)}">',
        f'<title>{escape(title)}</title>',
        f'<text x="{width / 2}" y="{MARGIN / 2}" text-anchor="middle" font-size="14">{escape(title)}</text>',
    ]
    for (x, y), v in sorted(cells.items()):
        i, j = xs.index(x), ys.index(y)
        px = MARGIN + CELL * i
        py = MARGIN + CELL * (len(ys) - 1 - j)  # larger y at the top
        t = (v - vmin) / span if math.isfinite(v) else float("nan")
        out.append(f'<rect x="{px}" y="{py}" width="{CELL}" height="{CELL}" fill="{_color(t)}" '
                   f'data-x="{fmt(x)}" data-y="{fmt(y)}" data-value="{fmt(v)}"/>')
    out.append(f'<text x="{width / 2}" y="{height - MARGIN / 4}" text-anchor="middle" font-size="12">'
               f'{escape(x_label)}</text>')
    out.append(f'<text x="{MARGIN / 4}" y="{height / 2}" font-size="12" '
               f'transform="rotate(-90 {MARGIN / 4} {height / 2})">{escape(y_label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def record_cells(records: Sequence[SweepRecord], quantity: str, analytic_layer: bool = False):
    cells = {}
    for r in records:
        n_a, n_b, n_c = r.point
        key = (n_a / (n_a + n_b) if n_a + n_b else 0.0, n_c / sum(r.point))
        if analytic_layer:
            pred = r.predictions.get(quantity)
            cells[key] = pred.value if pred else float("nan")
        else:
            st = r.stats.get(quantity)
            cells[key] = st.mean if st else float("nan")
    return cells


def write_heatmaps(out_dir: str, records: Sequence[SweepRecord], quantities: Sequence[str]) -> list[str]:
    """One empirical heatmap per quantity, plus an analytic layer where one exists."""
    paths = []
    for q in quantities:
        if not any(q in r.stats for r in records):
            continue
        layers = [("", False)]
        if any(q in r.predictions for r in records):
            layers.append(("_analytic", True))
        for suffix, an in layers:
            path = os.path.join(out_dir, f"{q}{suffix}.svg")
            title = f"{q} ({'leading-order prediction' if an else 'sample mean'})"
            with _open_for_write(path) as fh:
                fh.write(heatmap_svg(record_cells(records, q, an), title))
            paths.append(path)
    return paths


def write_outputs(records: Sequence[SweepRecord], cfg, config_echo: dict | None = None,
                  wall_time: float = 0.0, prefix: str = "sweep") -> dict[str, str]:
    """Write ``<prefix>.csv``, ``manifest.json`` and optional SVGs into ``cfg.output_path``."""
    from .ensemble import HIST_BINS, HIST_RANGE

    out_dir = cfg.output_path
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out_dir}: {exc.strerror}") from exc
    paths = {"csv": write_csv(os.path.join(out_dir, f"{prefix}.csv"), records, cfg.quantities)}
    echo = config_echo if config_echo is not None else {
        "grid": [list(p) for p in cfg.grid], "samples_per_point": cfg.samples_per_point,
        "quantities": list(cfg.quantities), "master_seed": cfg.master_seed,
        "emit_svg": cfg.emit_svg, "threads": cfg.threads, "experiment_id": cfg.experiment_id,
    }
    paths["manifest"] = write_manifest(os.path.join(out_dir, "manifest.json"), echo, cfg.master_seed,
                                       wall_time, records)
    if any(r.histogram is not None for r in records):
        paths["histograms"] = write_histograms(os.path.join(out_dir, "pt_histograms.json"), records,
                                               HIST_BINS, HIST_RANGE)
    if cfg.emit_svg:
        for p in write_heatmaps(out_dir, records, cfg.quantities):
            paths[os.path.basename(p)] = p
    return paths
