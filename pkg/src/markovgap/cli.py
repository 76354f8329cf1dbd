"""Command line entry point.

Exit codes: 0 success, 1 invalid config or arguments, 2 capacity violation,
3 failed ``--check``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from . import __version__, analytic, checks, ensemble, epopt, output, stab, zoo
from .config import load_config, parse_floats, parse_grid, parse_names, parse_range, parse_triple
from .errors import CapacityError, ConfigError, MarkovGapError
from .qstate import SeedTree, Tripartition

EXIT_OK, EXIT_CONFIG, EXIT_CAPACITY, EXIT_CHECK = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _u64(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="PATH", help="key = value or JSON config file")
    p.add_argument("--seed", type=_u64, metavar="U64", help="master seed (default 0)")
    p.add_argument("--out", metavar="DIR", help="output directory (default markovgap-out)")
    p.add_argument("--samples", type=_positive, metavar="N", help="samples per point")
    p.add_argument("--threads", type=_positive, metavar="N", help="worker threads (default 1)")
    p.add_argument("--emit-svg", action="store_true", default=None, help="write SVG heatmaps")
    p.add_argument("--check", action="store_true", help="exit 3 if the built-in checks fail")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="markovgap", description="Tripartite entanglement experiments on random states.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sweep", help="Monte Carlo sweep over a grid of (N_A, N_B, N_C)")
    _common(p)
    p.add_argument("--grid", help='"3,3,4; 2,2,12" or "n_ab=10 cross n_c=1..14"')
    p.add_argument("--quantities", help="comma separated, from: " + ", ".join(ensemble.QUANTITIES))

    p = sub.add_parser("phase-diagram", help="fixed-N_AB slice with empirical and analytic heatmaps")
    _common(p)
    p.add_argument("--n-ab", type=_positive)
    p.add_argument("--n-c-max", type=_positive)
    p.add_argument("--quantities")

    p = sub.add_parser("threshold-scan", help="PPT fraction versus N_C and its crossing of 1/2")
    _common(p)
    p.add_argument("--n-a", type=_positive)
    p.add_argument("--n-b", type=_positive)
    p.add_argument("--n-c-range", help='e.g. "5..11"')

    p = sub.add_parser("concentration", help="Markov gap tails against the Levy bound")
    _common(p)
    p.add_argument("--point", help='"N_A,N_B,N_C"')
    p.add_argument("--epsilons", help='e.g. "0.25,0.5,1"')

    p = sub.add_parser("mp-check", help="KS distance of induced spectra to the Marchenko-Pastur law")
    _common(p)
    p.add_argument("--d-sys", type=_positive)
    p.add_argument("--d-env", type=_positive)

    p = sub.add_parser("sots-check", help="invariant battery on random SOTS and the E_p examples")
    _common(p)
    p.add_argument("--specs", type=_positive, help="number of random SOTS specs (default 50)")
    p.add_argument("--restarts", type=_positive)

    p = sub.add_parser("stab-sample", help="random stabilizer states and their GHZ/EPR content")
    _common(p)
    p.add_argument("--point", help='"N_A,N_B,N_C" (default 4,4,4)')

    p = sub.add_parser("ep-estimate", help="entanglement of purification of a named state")
    _common(p)
    p.add_argument("--state", choices=("ghz", "w", "bell-triangle", "sots"))
    p.add_argument("--weights", help="SOTS sector weights, e.g. 0.25,0.75")
    p.add_argument("--restarts", type=_positive)
    p.add_argument("--max-iterations", type=_positive)
    return parser


# --------------------------------------------------------------------------
# option merging: command line beats config file beats defaults

DEFAULTS = {
    "master_seed": 0, "output_path": "markovgap-out", "threads": 1, "emit_svg": False,
}

_CLI_PARSERS = {
    "grid": parse_grid, "quantities": parse_names, "n_c_range": parse_range,
    "point": parse_triple, "epsilons": parse_floats, "weights": parse_floats,
}
_CLI_NAMES = {"seed": "master_seed", "out": "output_path", "samples": "samples_per_point"}


def resolve_options(args: argparse.Namespace) -> dict:
    opts = dict(DEFAULTS)
    if args.config:
        opts.update(load_config(args.config))
    for key, value in vars(args).items():
        if key in ("command", "config", "check") or value is None:
            continue
        key = _CLI_NAMES.get(key, key)
        opts[key] = _CLI_PARSERS[key](value) if key in _CLI_PARSERS and isinstance(value, str) else value
    return opts


def _require(opts: dict, *keys):
    missing = [k for k in keys if k not in opts]
    if missing:
        raise ConfigError(f"missing required setting(s): {', '.join(missing)}")
    return [opts[k] for k in keys]


def _out_dir(opts: dict) -> str:
    path = opts["output_path"]
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {path}: {exc.strerror}") from None
    return path


def _echo(opts: dict) -> dict:
    return {k: (list(map(list, v)) if k == "grid" else v) for k, v in sorted(opts.items())}


def _write_json(path: str, data: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2, sort_keys=True, default=output._json_default)
        fh.write("\n")


# --------------------------------------------------------------------------
# subcommands; each returns (exit code, summary lines)


def _records_exit(records) -> int:
    return EXIT_CAPACITY if any(r.status == "capacity" for r in records) else EXIT_OK


def _record_lines(records, quantities) -> list[str]:
    lines = []
    for r in records:
        if r.status != "ok":
            lines.append(f"{r.point} {r.phase.label}: {r.status}: {r.message}")
            continue
        parts = []
        for q in quantities:
            st = r.stats[q]
            pred = r.predictions.get(q)
            extra = f" (analytic {pred.value:.4g})" if pred else ""
            parts.append(f"{q}={st.mean:.6g}+-{st.stderr:.2g}{extra}")
        lines.append(f"{r.point} {r.phase.label}: " + ", ".join(parts))
    return lines


def _sweep_checks(records) -> checks.Battery:
    bat = checks.Battery("sweep consistency")
    bad_phase = sum(r.phase != analytic.classify_counts(r.point) for r in records)
    bat.add("phase labels inconsistent", bad_phase, 0)
    bad_counts = sum(r.ppt_count is not None and r.ppt_count + r.npt_count != r.samples
                     for r in records if r.status == "ok")
    bat.add("ppt + npt != samples", bad_counts, 0)
    bat.add("points not completed", sum(r.status != "ok" for r in records), 0)
    return bat


def cmd_sweep(opts: dict, args) -> tuple[int, list[str], checks.Battery | None]:
    (grid,) = _require(opts, "grid")
    cfg = ensemble.SweepConfig(
        tuple(grid), opts.get("samples_per_point", 200), tuple(opts.get("quantities", ("markov_gap",))),
        opts["master_seed"], opts["output_path"], opts["emit_svg"], opts["threads"],
        ensemble.EXPERIMENT_IDS["sweep"])
    t0 = time.perf_counter()
    records = ensemble.run_sweep(cfg)
    output.write_outputs(records, cfg, _echo(opts), time.perf_counter() - t0)
    return _records_exit(records), _record_lines(records, cfg.quantities), _sweep_checks(records)


def cmd_phase_diagram(opts: dict, args):
    n_ab = opts.get("n_ab", 4)
    n_c_max = opts.get("n_c_max", 8)
    quantities = tuple(opts.get("quantities", ("markov_gap", "log_negativity")))
    cfg = ensemble.SweepConfig(
        tuple(ensemble.phase_diagram_grid(n_ab, n_c_max)), opts.get("samples_per_point", 50), quantities,
        opts["master_seed"], opts["output_path"], True, opts["threads"], ensemble.EXPERIMENT_IDS["phase-diagram"])
    t0 = time.perf_counter()
    records = ensemble.run_sweep(cfg)
    output.write_outputs(records, cfg, _echo(opts), time.perf_counter() - t0, prefix="phase_diagram")
    bat = _sweep_checks(records)
    if "markov_gap" in quantities:
        ok = [r for r in records if r.status == "ok"]
        es = [r.stats["markov_gap"].mean for r in ok if r.phase.label == analytic.ES and not r.phase.boundary]
        ppt = [r.stats["markov_gap"].mean for r in ok if r.phase.label == analytic.PPT]
        if es and ppt:
            bat.add("mean PPT-region h minus mean ES-interior h", sum(ppt) / len(ppt) - sum(es) / len(es), 0.0)
        deepest = [r.stats["markov_gap"].mean for r in ok if r.point[2] == n_c_max and r.phase.label == analytic.PPT]
        if deepest:
            bat.add(f"max h at N_C = {n_c_max}", max(deepest), 0.1)
    return _records_exit(records), _record_lines(records, quantities), bat


def cmd_threshold_scan(opts: dict, args):
    n_a = opts.get("n_a", 3)
    n_b = opts.get("n_b", 3)
    n_c_range = opts.get("n_c_range", list(range(5, 12)))
    report, records = ensemble.threshold_scan(n_a, n_b, n_c_range, opts.get("samples_per_point", 200),
                                              opts["master_seed"], opts["threads"])
    out = _out_dir(opts)
    cfg = ensemble.SweepConfig(tuple(r.point for r in records), max(r.samples for r in records),
                               ("ppt_fraction",), opts["master_seed"], out, False, opts["threads"],
                               ensemble.EXPERIMENT_IDS["threshold-scan"])
    output.write_outputs(records, cfg, _echo(opts), prefix="threshold_scan")
    with open(os.path.join(out, "threshold_rows.csv"), "w", encoding="utf-8", newline="") as fh:
        fh.write("n_c,ppt_count,samples,fraction,ci_low,ci_high\n")
        for r in report.rows:
            fh.write(",".join(output.fmt(x) for x in (r.n_c, r.ppt_count, r.samples, r.fraction,
                                                      r.ci_low, r.ci_high)) + "\n")
    lines = [f"N_C={r.n_c}: PPT {r.ppt_count}/{r.samples} = {r.fraction:.3f} "
             f"[{r.ci_low:.3f}, {r.ci_high:.3f}]" for r in report.rows]
    crossing = "none" if report.crossing is None else f"{report.crossing:.3f}"
    lines.append(f"crossing N_C = {crossing}; predicted log2(4 D_A D_B) = {report.predicted:g}")
    bat = checks.Battery("threshold")
    dev = float("inf") if report.crossing is None else abs(report.crossing - report.predicted)
    bat.add("|crossing - log2(4 D_A D_B)|", dev, 1.0)
    return EXIT_OK, lines, bat


def cmd_concentration(opts: dict, args):
    point = opts.get("point", (3, 3, 4))
    eps = opts.get("epsilons", [0.25, 0.5, 1.0])
    rep = ensemble.concentration_experiment(point, eps, opts.get("samples_per_point", 500),
                                            opts["master_seed"], opts["threads"])
    _write_json(os.path.join(_out_dir(opts), "concentration.json"),
                {"config": _echo(opts), "report": rep.__dict__ | {"rows": [r.__dict__ for r in rep.rows]}})
    lines = [f"{rep.point}: mean h {rep.mean:.6g}, median {rep.median:.6g}, std {rep.std:.4g}, "
             f"std/mean {rep.normalized_spread:.4g}, Lipschitz {rep.lipschitz:.4g}"]
    lines += [f"eps={r.epsilon:g}: tail {r.tail:.4f} +- {r.stderr:.4f}, bound {r.bound:.4g}" for r in rep.rows]
    bat = checks.Battery("concentration")
    for r in rep.rows:
        bat.add(f"tail(eps={r.epsilon:g}) - bound - 3 stderr", r.tail - r.bound - 3 * r.stderr, 0.0)
    return EXIT_OK, lines, bat


def cmd_mp_check(opts: dict, args):
    d_sys = opts.get("d_sys", 64)
    d_env = opts.get("d_env", 1024)
    rep = ensemble.mp_check(d_sys, d_env, opts.get("samples_per_point", 100), opts["master_seed"],
                            opts["threads"])
    _write_json(os.path.join(_out_dir(opts), "mp_check.json"), {"config": _echo(opts), "report": rep.__dict__})
    note = " (degenerate: rank one, atom-only comparison)" if rep.degenerate else ""
    lines = [f"d_sys={d_sys} d_env={d_env} c={rep.c:g} tau={rep.tau:g}: "
             f"mean KS {rep.mean_ks:.5f} +- {rep.stderr:.5f}{note}"]
    bat = checks.Battery("Marchenko-Pastur")
    bat.add("mean KS", rep.mean_ks, 0.08)
    return EXIT_OK, lines, bat


def cmd_sots_check(opts: dict, args):
    seed = SeedTree(opts["master_seed"], (ensemble.EXPERIMENT_IDS["sots-check"],))
    sots = checks.sots_battery(opts.get("specs", 50), seed.child(0))
    cfg = epopt.EpConfig(restarts=opts.get("restarts", 8))
    ep = checks.ep_battery(cfg, seed.child(1), threads=opts["threads"])
    _write_json(os.path.join(_out_dir(opts), "sots_check.json"),
                {"config": _echo(opts), "batteries": [sots.as_dict(), ep.as_dict()]})
    bat = checks.Battery("sots-check", sots.checks + ep.checks)
    return EXIT_OK, sots.lines() + ep.lines(), bat


def cmd_stab_sample(opts: dict, args):
    point = opts.get("point", (4, 4, 4))
    part = Tripartition(*point)
    count = opts.get("samples_per_point", 200)
    seed = SeedTree(opts["master_seed"], (ensemble.EXPERIMENT_IDS["stab-sample"],))
    out = _out_dir(opts)
    rows = []
    for i in range(count):
        tab = stab.sample_random_stabilizer(part.total, seed.child(i))
        rows.append(stab.ghz_epr_decomposition(tab, part).as_tuple())
    with open(os.path.join(out, "stab_sample.csv"), "w", encoding="utf-8", newline="") as fh:
        fh.write("sample,e_ab,e_bc,e_ac,g_abc,s_a,s_b,s_c\n")
        for i, r in enumerate(rows):
            fh.write(",".join(str(x) for x in (i, *r)) + "\n")
    n_sep = sum(r[0] == 0 for r in rows)
    mean = [sum(col) / count for col in zip(*rows)]
    lines = [f"{tuple(point)}: {count} states, e_ab = 0 (PPT, separable) in {n_sep}/{count}",
             "mean counts e_ab,e_bc,e_ac,g,s_a,s_b,s_c = " + ", ".join(f"{m:.3f}" for m in mean)]
    bat = None
    if args.check:
        bat = checks.stab_battery(seed=seed.child(10**6))
        lines += bat.lines()
    return EXIT_OK, lines, bat


def cmd_ep_estimate(opts: dict, args):
    name = opts.get("state", "ghz")
    if name == "ghz":
        state, part = zoo.ghz_state(3), Tripartition(1, 1, 1)
    elif name == "w":
        state, part = zoo.w_state(3), Tripartition(1, 1, 1)
    elif name == "bell-triangle":
        b = zoo.bell_state()
        spec = zoo.TriangleSpec.from_states(b, b, b)
        state, part = zoo.triangle_state(spec), zoo.triangle_partition(spec)
    elif name == "sots":
        spec = zoo.ghz_sots_spec(tuple(opts.get("weights", (0.25, 0.75))))
        state, part = zoo.sots_state(spec), spec.partition()
    else:
        raise ConfigError(f"unknown state {name!r}")
    cfg = epopt.EpConfig(restarts=opts.get("restarts", 32), max_iterations=opts.get("max_iterations", 500))
    seed = SeedTree(opts["master_seed"], (ensemble.EXPERIMENT_IDS["ep-estimate"],))
    res = epopt.entanglement_of_purification(state, part, cfg, seed, opts["threads"])
    from .measures import mutual_information

    mi = mutual_information(state, part)
    g = 2 * res.value - mi
    _write_json(os.path.join(_out_dir(opts), "ep_estimate.json"),
                {"config": _echo(opts), "state": name, "e_p": res.value, "mutual_info": mi, "g": g,
                 "best_split": res.best_split, "iterations": res.iterations_used})
    lines = [f"{name}: E_p = {res.value:.10f} (split {res.best_split}), I = {mi:.10f}, g = {g:.10f}"]
    bat = checks.Battery("ep-estimate")
    bat.add("-g (g must be non-negative)", -g, 1e-6)
    return EXIT_OK, lines, bat


COMMANDS = {
    "sweep": cmd_sweep, "phase-diagram": cmd_phase_diagram, "threshold-scan": cmd_threshold_scan,
    "concentration": cmd_concentration, "mp-check": cmd_mp_check, "sots-check": cmd_sots_check,
    "stab-sample": cmd_stab_sample, "ep-estimate": cmd_ep_estimate,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        opts = resolve_options(args)
        code, lines, bat = COMMANDS[args.command](opts, args)
    except ConfigError as exc:
        print(f"markovgap: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CapacityError as exc:
        print(f"markovgap: capacity: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (MarkovGapError, OSError) as exc:
        print(f"markovgap: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for line in lines:
        print(line)
    if code != EXIT_OK:
        print("markovgap: some points exceeded capacity; output is partial", file=sys.stderr)
        return code
    if args.check and bat is not None:
        if args.command not in ("sots-check", "stab-sample"):
            print("\n".join(bat.lines()))
        if not bat.ok:
            return EXIT_CHECK
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
