"""Monte Carlo sweeps over (N_A, N_B, N_C) grids and the derived experiments.

Every sample is a pure function of its seed path
``(master_seed, experiment_id, point_index, sample_index)`` and results are
stored by sample index, then reduced with a fixed pairwise merge tree. The
output is therefore independent of the thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.stats import binomtest

from . import analytic
from .errors import CapacityError, ConfigError, MarkovGapError
from .measures import (
    bipartite_mutual_information,
    markov_gap,
    ppt_tolerance,
    pt_spectrum,
    reflected_entropy,
    spectrum,
    von_neumann_entropy,
)
from .qstate import SeedTree, partial_trace, sample_induced_dm

QUANTITIES = ("entropy", "purity", "mutual_info", "cmi", "log_negativity", "ppt_fraction",
              "reflected_entropy", "markov_gap", "pt_spectrum_histogram", "mp_ks")
REFLECTED = {"reflected_entropy", "markov_gap"}
PT_BASED = {"log_negativity", "ppt_fraction", "pt_spectrum_histogram"}

MAX_REFLECTED_DAB = 2**10
MAX_PT_DAB = 2**12

HIST_BINS = 64
HIST_RANGE = (-8.0, 8.0)

EXPERIMENT_IDS = {
    "sweep": 0, "phase-diagram": 1, "threshold-scan": 2, "concentration": 3,
    "mp-check": 4, "sots-check": 5, "stab-sample": 6, "ep-estimate": 7,
}


@dataclass(frozen=True)
class SweepConfig:
    grid: tuple[tuple[int, int, int], ...]
    samples_per_point: int = 200
    quantities: tuple[str, ...] = ("markov_gap",)
    master_seed: int = 0
    output_path: str = "markovgap-out"
    emit_svg: bool = False
    threads: int = 1
    experiment_id: int = 0

    def __post_init__(self):
        grid = tuple(tuple(int(x) for x in p) for p in self.grid)
        if any(len(p) != 3 or min(p) < 0 or sum(p) == 0 for p in grid):
            raise ConfigError(f"grid points must be non-negative (N_A, N_B, N_C) triples: {self.grid}")
        object.__setattr__(self, "grid", grid)
        if int(self.samples_per_point) < 1:
            raise ConfigError("samples_per_point must be at least 1")
        qs = tuple(self.quantities)
        unknown = [q for q in qs if q not in QUANTITIES]
        if unknown or not qs:
            raise ConfigError(f"unknown quantities {unknown}; choose from {QUANTITIES}")
        # canonical order keeps the CSV header fixed
        object.__setattr__(self, "quantities", tuple(q for q in QUANTITIES if q in qs))
        if not 0 <= int(self.master_seed) < 2**64:
            raise ConfigError("master_seed must be a 64-bit unsigned integer")
        if int(self.threads) < 1:
            raise ConfigError("threads must be at least 1")


@dataclass(frozen=True)
class QuantityStats:
    mean: float
    stderr: float
    min: float
    max: float
    count: int


@dataclass
class SweepRecord:
    point: tuple[int, int, int]
    phase: analytic.PhaseLabel
    seed_path: tuple[int, ...]
    stats: dict[str, QuantityStats] = field(default_factory=dict)
    predictions: dict[str, analytic.Prediction] = field(default_factory=dict)
    ppt_count: int | None = None
    npt_count: int | None = None
    histogram: np.ndarray | None = None
    status: str = "ok"
    message: str = ""

    @property
    def samples(self) -> int:
        return max((s.count for s in self.stats.values()), default=0)


# --------------------------------------------------------------------------
# aggregation


@dataclass(frozen=True)
class _Moments:
    n: int
    mean: float
    m2: float
    lo: float
    hi: float


def _merge(a: _Moments, b: _Moments) -> _Moments:
    n = a.n + b.n
    delta = b.mean - a.mean
    return _Moments(n, a.mean + delta * b.n / n, a.m2 + b.m2 + delta * delta * a.n * b.n / n,
                    min(a.lo, b.lo), max(a.hi, b.hi))


def _tree(values: Sequence[float], lo: int, hi: int) -> _Moments:
    if hi - lo == 1:
        x = float(values[lo])
        return _Moments(1, x, 0.0, x, x)
    mid = (lo + hi) // 2
    return _merge(_tree(values, lo, mid), _tree(values, mid, hi))


def aggregate(values: Sequence[float]) -> QuantityStats:
    """Mean, standard error, min and max via a fixed pairwise merge tree."""
    if len(values) == 0:
        raise ConfigError("cannot aggregate an empty sample")
    m = _tree(values, 0, len(values))
    stderr = math.sqrt(m.m2 / (m.n - 1)) / math.sqrt(m.n) if m.n > 1 else float("nan")
    return QuantityStats(m.mean, stderr, m.lo, m.hi, m.n)


# --------------------------------------------------------------------------
# per-sample kernel


def check_capacity(point, quantities) -> None:
    n_a, n_b, n_c = point
    d_ab = 2 ** (n_a + n_b)
    if 2 ** (n_a + n_b + n_c) > 2**26:
        raise CapacityError(f"point {point}: D_AB*D_C exceeds 2^26")
    if REFLECTED & set(quantities):
        if d_ab > MAX_REFLECTED_DAB:
            raise CapacityError(f"point {point}: D_AB={d_ab} exceeds {MAX_REFLECTED_DAB} for reflected quantities")
    if PT_BASED & set(quantities) and d_ab > MAX_PT_DAB:
        raise CapacityError(f"point {point}: D_AB={d_ab} exceeds {MAX_PT_DAB} for partial transposes")


def sample_quantities(point, quantities, seed: SeedTree) -> dict:
    """All requested quantities of one induced ``rho_AB`` sample."""
    n_a, n_b, n_c = point
    d_a, d_b, d_c = 2**n_a, 2**n_b, 2**n_c
    rho = sample_induced_dm((d_a, d_b), d_c, seed)
    out: dict = {}
    need = set(quantities)
    s_a = s_b = s_ab = None
    if need & {"entropy", "mutual_info", "cmi", "purity"}:
        rho_a = partial_trace(rho, [0])
        s_a = von_neumann_entropy(rho_a).nats
        if "purity" in need:
            lam = spectrum(rho_a)
            out["purity"] = float(np.sum(lam**2))
    if need & {"mutual_info", "cmi"}:
        s_b = von_neumann_entropy(partial_trace(rho, [1])).nats
        s_ab = von_neumann_entropy(rho).nats
    if "entropy" in need:
        out["entropy"] = s_a
    if "mutual_info" in need:
        out["mutual_info"] = s_a + s_b - s_ab
    if "cmi" in need:
        # the global state is pure: S(AC) = S(B), S(BC) = S(A), S(C) = S(AB), S(ABC) = 0
        out["cmi"] = s_b + s_a - s_ab
    if need & PT_BASED:
        pts = pt_spectrum(rho, [1])
        if "log_negativity" in need:
            out["log_negativity"] = float(max(np.log(np.sum(np.abs(pts))), 0.0))
        if "ppt_fraction" in need:
            out["ppt_fraction"] = 1.0 if pts[-1] >= -ppt_tolerance(rho.dim) else 0.0
        if "pt_spectrum_histogram" in need:
            out["pt_spectrum_histogram"] = float(np.mean(pts < -ppt_tolerance(rho.dim)))
            out["_hist"] = np.histogram(pts * rho.dim, bins=HIST_BINS, range=HIST_RANGE)[0]
    if "reflected_entropy" in need and "markov_gap" in need:
        sr = reflected_entropy(rho)
        out["reflected_entropy"] = sr
        out["markov_gap"] = sr - bipartite_mutual_information(rho)
    elif "reflected_entropy" in need:
        out["reflected_entropy"] = reflected_entropy(rho)
    elif "markov_gap" in need:
        out["markov_gap"] = markov_gap(rho)
    if "mp_ks" in need:
        out["mp_ks"] = analytic.mp_ks_distance(spectrum(rho), d_c / (d_a * d_b), 1.0 / d_c)
    return out


def predictions_for(point, quantities) -> dict[str, analytic.Prediction]:
    """Closed-form leading-order predictions for the requested quantities."""
    n_a, n_b, n_c = point
    d_a, d_b, d_c = 2**n_a, 2**n_b, 2**n_c
    preds = {}
    for q in quantities:
        if q == "entropy":
            preds[q] = analytic.Prediction(analytic.page_entropy(d_a, d_b * d_c), "page")
        elif q == "purity":
            preds[q] = analytic.Prediction(analytic.avg_purity(d_a, d_b * d_c), "exact")
        elif q in ("mutual_info", "cmi"):
            preds[q] = analytic.avg_cmi(point)
        elif q == "log_negativity":
            preds[q] = analytic.avg_log_negativity(point)
        elif q == "ppt_fraction":
            s_ppt = analytic.thresholds(d_a, d_b, 0, 0).s_ppt
            preds[q] = analytic.Prediction(1.0 if d_c > s_ppt else 0.0 if d_c < s_ppt else 0.5, "threshold")
        elif q == "reflected_entropy":
            preds[q] = analytic.Prediction(analytic.avg_reflected_entropy(d_a, d_b, d_c),
                                           analytic.classify_counts(point).label)
        elif q == "markov_gap":
            preds[q] = analytic.avg_markov_gap(point)
    return preds


# --------------------------------------------------------------------------
# sweeps


def _parallel_map(fn: Callable, items: list, threads: int) -> list:
    if threads <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def run_sweep(cfg: SweepConfig) -> list[SweepRecord]:
    """Sample every grid point and aggregate; capacity failures are flagged per point."""
    root = SeedTree(cfg.master_seed, (cfg.experiment_id,))
    records: list[SweepRecord] = []
    tasks = []
    for pi, point in enumerate(cfg.grid):
        phase = analytic.classify_counts(point)
        rec = SweepRecord(point, phase, (cfg.master_seed, cfg.experiment_id, pi))
        records.append(rec)
        try:
            check_capacity(point, cfg.quantities)
        except CapacityError as exc:
            rec.status, rec.message = "capacity", str(exc)
            continue
        rec.predictions = predictions_for(point, cfg.quantities)
        for si in range(cfg.samples_per_point):
            tasks.append((pi, si))

    def run(task):
        pi, si = task
        try:
            return sample_quantities(cfg.grid[pi], cfg.quantities, root.child(pi, si))
        except MarkovGapError as exc:
            return exc

    results = _parallel_map(run, tasks, cfg.threads)

    by_point: dict[int, list] = {}
    for (pi, _si), res in zip(tasks, results):
        by_point.setdefault(pi, []).append(res)
    for pi, res in by_point.items():
        rec = records[pi]
        failure = next((r for r in res if isinstance(r, Exception)), None)
        if failure is not None:
            rec.status = "capacity" if isinstance(failure, CapacityError) else "error"
            rec.message = str(failure)
            continue
        for q in cfg.quantities:
            rec.stats[q] = aggregate([r[q] for r in res])
        if "ppt_fraction" in cfg.quantities:
            rec.ppt_count = int(sum(r["ppt_fraction"] for r in res))
            rec.npt_count = len(res) - rec.ppt_count
        if "pt_spectrum_histogram" in cfg.quantities:
            rec.histogram = np.sum([r["_hist"] for r in res], axis=0)
    return records


def phase_diagram_grid(n_ab: int, n_c_max: int) -> list[tuple[int, int, int]]:
    """``N_A = 1..n_ab-1`` (``N_B = n_ab - N_A``) crossed with ``N_C = 1..n_c_max``."""
    if n_ab < 2 or n_c_max < 1:
        raise ConfigError("need n_ab >= 2 and n_c_max >= 1")
    return [(n_a, n_ab - n_a, n_c) for n_c in range(1, n_c_max + 1) for n_a in range(1, n_ab)]


def phase_diagram(n_ab: int, n_c_max: int, samples: int, seed: int, threads: int = 1,
                  quantities=("markov_gap", "log_negativity")) -> list[SweepRecord]:
    """Sweep the fixed-``N_AB`` slice of the phase diagram."""
    cfg = SweepConfig(tuple(phase_diagram_grid(n_ab, n_c_max)), samples, tuple(quantities), seed,
                      threads=threads, experiment_id=EXPERIMENT_IDS["phase-diagram"])
    return run_sweep(cfg)


# --------------------------------------------------------------------------
# threshold scan


@dataclass(frozen=True)
class ThresholdRow:
    n_c: int
    ppt_count: int
    samples: int
    fraction: float
    ci_low: float
    ci_high: float


@dataclass(frozen=True)
class ThresholdReport:
    n_a: int
    n_b: int
    rows: tuple[ThresholdRow, ...]
    crossing: float | None
    predicted: float


def wilson_interval(k: int, n: int, confidence: float = 0.95) -> tuple[float, float]:
    ci = binomtest(k, n).proportion_ci(confidence_level=confidence, method="wilson")
    return float(ci.low), float(ci.high)


def find_crossing(n_c: Sequence[int], fraction: Sequence[float], level: float = 0.5) -> float | None:
    """First upward crossing of ``level`` by linear interpolation."""
    for i in range(len(n_c) - 1):
        f0, f1 = fraction[i], fraction[i + 1]
        if f0 < level <= f1:
            return n_c[i] + (level - f0) / (f1 - f0) * (n_c[i + 1] - n_c[i])
    if fraction and fraction[0] >= level:
        return float(n_c[0])
    return None


def threshold_scan(n_a: int, n_b: int, n_c_range: Sequence[int], samples: int, seed: int,
                   threads: int = 1) -> tuple[ThresholdReport, list[SweepRecord]]:
    """PPT fraction versus ``N_C`` and its crossing of 1/2."""
    n_c_range = list(n_c_range)
    cfg = SweepConfig(tuple((n_a, n_b, n_c) for n_c in n_c_range), samples, ("ppt_fraction",), seed,
                      threads=threads, experiment_id=EXPERIMENT_IDS["threshold-scan"])
    records = run_sweep(cfg)
    rows = []
    for rec in records:
        if rec.status != "ok":
            raise CapacityError(rec.message)
        k, n = rec.ppt_count, rec.samples
        lo, hi = wilson_interval(k, n)
        rows.append(ThresholdRow(rec.point[2], k, n, k / n, lo, hi))
    crossing = find_crossing([r.n_c for r in rows], [r.fraction for r in rows])
    predicted = math.log2(analytic.thresholds(2**n_a, 2**n_b, 0, 0).s_ppt)
    return ThresholdReport(n_a, n_b, tuple(rows), crossing, predicted), records


# --------------------------------------------------------------------------
# concentration


@dataclass(frozen=True)
class TailRow:
    epsilon: float
    tail: float
    stderr: float
    bound: float
    ok: bool


@dataclass(frozen=True)
class ConcentrationReport:
    point: tuple[int, int, int]
    samples: int
    mean: float
    median: float
    std: float
    normalized_spread: float
    lipschitz: float
    rows: tuple[TailRow, ...]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.rows)


def markov_gap_samples(point, samples: int, seed: int, threads: int = 1, experiment: str = "concentration"):
    cfg = SweepConfig((tuple(point),), samples, ("markov_gap",), seed, threads=threads,
                      experiment_id=EXPERIMENT_IDS[experiment])
    check_capacity(cfg.grid[0], cfg.quantities)
    root = SeedTree(seed, (cfg.experiment_id,))
    vals = _parallel_map(lambda si: sample_quantities(cfg.grid[0], cfg.quantities, root.child(0, si))["markov_gap"],
                         list(range(samples)), threads)
    return np.array(vals)


def concentration_experiment(point, epsilons: Sequence[float], samples: int, seed: int,
                             threads: int = 1) -> ConcentrationReport:
    """Empirical tails ``P(|h - median| > eps)`` against the Levy bound."""
    n_a, n_b, n_c = (int(x) for x in point)
    h = markov_gap_samples((n_a, n_b, n_c), samples, seed, threads)
    d_total = 2 ** (n_a + n_b + n_c)
    lip = analytic.lipschitz_constants(2 ** min(n_a, n_b), d_total)["markov_gap"]
    med = float(np.median(h))
    rows = []
    for eps in epsilons:
        tail = float(np.mean(np.abs(h - med) > eps))
        stderr = math.sqrt(tail * (1 - tail) / samples)
        bound = analytic.levy_bound(eps, lip, d_total)
        rows.append(TailRow(float(eps), tail, stderr, bound, tail <= bound + 3 * stderr))
    mean = float(np.mean(h))
    std = float(np.std(h, ddof=1)) if samples > 1 else 0.0
    spread = std / mean if mean != 0 else float("inf")
    return ConcentrationReport((n_a, n_b, n_c), samples, mean, med, std, spread, lip, tuple(rows))


# --------------------------------------------------------------------------
# Marchenko-Pastur check


@dataclass(frozen=True)
class MpReport:
    d_sys: int
    d_env: int
    c: float
    tau: float
    samples: int
    mean_ks: float
    stderr: float
    degenerate: bool


def mp_check(d_sys: int, d_env: int, samples: int, seed: int, threads: int = 1) -> MpReport:
    """Mean KS distance of induced spectra to the MP law with ``tau = 1/d_env``, ``c = d_env/d_sys``."""
    if d_sys < 1 or d_env < 1 or samples < 1:
        raise ConfigError("d_sys, d_env and samples must be positive")
    if d_sys * d_env > 2**26:
        raise CapacityError(f"d_sys*d_env = {d_sys * d_env} exceeds 2^26")
    c, tau = d_env / d_sys, 1.0 / d_env
    root = SeedTree(seed, (EXPERIMENT_IDS["mp-check"], d_sys, d_env))

    def one(si):
        rho = sample_induced_dm(d_sys, d_env, root.child(si))
        return analytic.mp_ks_distance(spectrum(rho), c, tau)

    ks = _parallel_map(one, list(range(samples)), threads)
    st = aggregate(ks)
    return MpReport(d_sys, d_env, c, tau, samples, st.mean, st.stderr, degenerate=d_env == 1)
