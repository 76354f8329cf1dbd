"""Invariant batteries shared by the CLI ``--check`` mode and the test suite.

Each battery returns a :class:`Battery` of named checks with the worst
observed value, so callers can print or assert on them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import log

import numpy as np

from . import epopt, stab, zoo
from .measures import (
    entanglement_entropy,
    is_ppt,
    log_negativity,
    marginal_ab,
    markov_gap,
    mutual_information,
    pt_spectrum,
)
from .qstate import PureState, SeedTree, Tripartition, as_seed, haar_unitary

LN2 = log(2)


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    value: float
    threshold: float
    detail: str = ""

    def line(self) -> str:
        tag = "PASS" if self.ok else "FAIL"
        return f"{tag} {self.name}: {self.value:.6g} (threshold {self.threshold:.6g}) {self.detail}".rstrip()


@dataclass
class Battery:
    title: str
    checks: list[Check] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def add(self, name: str, value: float, threshold: float, ok: bool | None = None, detail: str = ""):
        ok = value <= threshold if ok is None else ok
        self.checks.append(Check(name, bool(ok), float(value), float(threshold), detail))

    def lines(self) -> list[str]:
        return [f"[{self.title}]"] + ["  " + c.line() for c in self.checks]

    def as_dict(self) -> dict:
        return {"title": self.title, "ok": self.ok,
                "checks": [{"name": c.name, "ok": c.ok, "value": c.value, "threshold": c.threshold,
                            "detail": c.detail} for c in self.checks]}


# --------------------------------------------------------------------------
# sums of triangle states


def sots_battery(n_specs: int = 50, seed: SeedTree | int = 0, max_qubits: int = 8, tol: float = 1e-8,
                 npt_margin: float = 1e-6) -> Battery:
    """Markov gap, entropy identities, MMI deficit and distillability on random SOTS."""
    root = as_seed(seed)
    worst_h = worst_id = worst_mmi = 0.0
    npt_needed = npt_ok = 0
    worst_npt = -np.inf
    for i in range(n_specs):
        spec = zoo.random_sots_spec(root.child(i), max_qubits=max_qubits)
        state = zoo.sots_state(spec)
        part = spec.partition()
        rho = marginal_ab(state, part)
        worst_h = max(worst_h, abs(markov_gap(rho)))
        an = zoo.sots_analytic(spec)
        dense = (entanglement_entropy(state, part.sites_a), entanglement_entropy(state, part.sites_b),
                 entanglement_entropy(state, part.sites_c), mutual_information(state, part))
        worst_id = max(worst_id, max(abs(x - y) for x, y in
                                     zip(dense, (an.entropy_a, an.entropy_b, an.entropy_c, an.mutual_ab))))
        worst_mmi = max(worst_mmi, abs(zoo.mmi_deficit(state, part) + an.g))
        if not zoo.sots_marginal_is_separable(spec):
            npt_needed += 1
            lam_min = float(pt_spectrum(rho, [1])[-1])
            worst_npt = max(worst_npt, lam_min)
            npt_ok += lam_min < -npt_margin
    bat = Battery(f"SOTS battery ({n_specs} specs, <= {max_qubits} qubits)")
    bat.add("max |h|", worst_h, tol)
    bat.add("max entropy-identity error", worst_id, tol)
    bat.add("max |mmi_deficit + H(p)|", worst_mmi, tol)
    bat.add("entangled-sector marginals NPT", worst_npt if npt_needed else -np.inf, -npt_margin,
            ok=npt_ok == npt_needed, detail=f"{npt_ok}/{npt_needed} NPT")
    return bat


# --------------------------------------------------------------------------
# entanglement of purification


def scrambled_triangle(seed: SeedTree | int) -> tuple[PureState, Tripartition]:
    """Random qubit triangle with a Haar unitary applied across all of C."""
    rng = as_seed(seed).generator()
    mats = [zoo.random_bipartite(2, 2, rng) for _ in range(3)]
    spec = zoo.TriangleSpec(*mats)
    state = zoo.triangle_state(spec)
    part = zoo.triangle_partition(spec)
    d_c = 2**part.n_c
    u = haar_unitary(d_c, as_seed(seed).child(1))
    t = state.amplitudes.reshape(d_c, -1)  # C occupies the slowest sites
    return PureState.from_vector((u @ t).ravel(), state.dims), part


def ep_battery(cfg: epopt.EpConfig | None = None, seed: SeedTree | int = 0, n_triangles: int = 3,
               tol: float = 1e-3, threads: int = 1) -> Battery:
    """``g`` on GHZ, triangle states and the two-sector SOTS with ``p = (1/4, 3/4)``."""
    root = as_seed(seed)
    bat = Battery("entanglement of purification")
    g = epopt.g_gap(zoo.ghz_state(3), Tripartition(1, 1, 1), cfg, root.child(0), threads)
    bat.add("|g(GHZ) - ln 2|", abs(g - LN2), tol)

    bell = zoo.bell_state()
    spec = zoo.TriangleSpec.from_states(bell, bell, bell)
    worst = epopt.g_gap(zoo.triangle_state(spec), zoo.triangle_partition(spec), cfg, root.child(1), threads)
    for k in range(n_triangles):
        state, part = scrambled_triangle(root.child(2, k))
        worst = max(worst, epopt.g_gap(state, part, cfg, root.child(3, k), threads))
    bat.add("max g(triangle)", worst, tol)

    spec = zoo.ghz_sots_spec((0.25, 0.75))
    g = epopt.g_gap(zoo.sots_state(spec), spec.partition(), cfg, root.child(4), threads)
    bat.add("|g(SOTS p=1/4,3/4) - H(p)|", abs(g - 0.5623351446188083), tol, detail=f"g = {g:.10f}")
    return bat


# --------------------------------------------------------------------------
# stabilizer states


def _random_partition(n: int, rng: np.random.Generator) -> Tripartition:
    cuts = np.sort(rng.integers(0, n + 1, 2))
    return Tripartition(int(cuts[0]), int(cuts[1] - cuts[0]), int(n - cuts[1]))


def stab_battery(count: int = 200, seed: SeedTree | int = 0, n_max: int = 10, h_max_qubits: int = 8,
                 jump_samples: int = 200, tol: float = 1e-8) -> Battery:
    """GF(2) versus dense entropies, Markov gap, decomposition and the PPT jump at n = 12."""
    root = as_seed(seed)
    rng = root.child(0).generator()
    mismatches = 0
    worst_h = worst_en = 0.0
    decomp_ok = True
    for i in range(count):
        n = 1 + i % n_max
        tab = stab.sample_random_stabilizer(n, root.child(1, i))
        psi = stab.stab_to_dense(tab)
        for _ in range(3):
            k = int(rng.integers(0, n + 1))
            subset = sorted(rng.choice(n, size=k, replace=False).tolist())
            dense = entanglement_entropy(psi, subset) / LN2 if subset else 0.0
            if abs(dense - stab.stab_entropy(tab, subset)) > tol:
                mismatches += 1
        if n <= h_max_qubits:
            part = _random_partition(n, rng)
            if part.n_a and part.n_b:
                worst_h = max(worst_h, abs(markov_gap(stab.stab_marginal_ab(tab, part))))
            counts = stab.ghz_epr_decomposition(tab, part)
            decomp_ok &= min(counts.as_tuple()) >= 0 and sum(
                counts.as_tuple()[:3]) * 2 + 3 * counts.g_abc + sum(counts.as_tuple()[4:]) == n
            if part.n_a and part.n_b:
                en = log_negativity(stab.stab_marginal_ab(tab, part), [1])
                worst_en = max(worst_en, abs(en - counts.e_ab * LN2))
    bat = Battery(f"stabilizer suite ({count} tableaux, n <= {n_max})")
    bat.add("GF(2)/dense entropy mismatches", mismatches, 0)
    bat.add("max |h|", worst_h, tol)
    bat.add("decomposition counts valid", 0 if decomp_ok else 1, 0)
    bat.add("max |E_N - e_ab ln 2|", worst_en, tol)

    for j, point, want_low in ((2, (4, 4, 4), True), (3, (2, 2, 8), False)):
        part = Tripartition(*point)
        ppt = coincide = 0
        for i in range(jump_samples):
            tab = stab.sample_random_stabilizer(part.total, root.child(j, i))
            counts = stab.ghz_epr_decomposition(tab, part)
            p, _ = is_ppt(stab.stab_marginal_ab(tab, part), [1])
            ppt += p
            coincide += p == (counts.e_ab == 0)
        frac = ppt / jump_samples
        if want_low:
            bat.add(f"PPT fraction at {point}", frac, 0.10, ok=frac < 0.10)
        else:
            bat.add(f"PPT fraction at {point}", frac, 0.90, ok=frac > 0.90)
        bat.add(f"PPT iff e_ab = 0 at {point}", jump_samples - coincide, 0)
    return bat
