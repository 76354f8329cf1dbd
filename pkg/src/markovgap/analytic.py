"""Closed-form leading-order predictions for the tripartite Haar ensemble.

Every piecewise prediction drops the O(D^-alpha) and O(1) corrections; the
returned :class:`Prediction` carries ``order="leading"`` so callers compare
with slack rather than equality.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import exp, log, pi, sqrt
from typing import NamedTuple

import numpy as np
from scipy.integrate import cumulative_simpson

from .errors import DomainError

LN2 = log(2)

PPT, ES, ME = "PPT", "ES", "ME"

# default s_SEP bracket constants
SEP_C_LOW = 0.1
SEP_C_HIGH = 10.0


class Prediction(NamedTuple):
    value: float
    regime: str
    boundary: bool = False
    order: str = "leading"


@dataclass(frozen=True)
class PhaseLabel:
    """Phase of a point of the proportion simplex.

    ``boundary`` marks points on a phase border (a proportion equal to 1/2);
    such points carry the ES label. ``separable`` is true when ``n_c``
    exceeds the separability threshold.
    """

    label: str
    boundary: bool = False
    separable: bool = False

    def __post_init__(self):
        if self.label not in (PPT, ES, ME):
            raise DomainError(f"unknown phase label {self.label!r}")


@dataclass(frozen=True)
class ThresholdSet:
    s_ppt: int
    s_sep_low: float
    s_sep_high: float
    n_ppt: float
    n_sep: float

    def __post_init__(self):
        # n_sep <= 3/5 only holds at the self-consistent point n_c = n_sep,
        # so only the ordering against n_ppt is a type invariant
        if self.n_sep < self.n_ppt - 1e-12:
            raise DomainError(f"n_sep={self.n_sep} below n_ppt={self.n_ppt}")


# --------------------------------------------------------------------------
# bipartite


def page_entropy(d_a: int, d_b: int) -> float:
    """Average entanglement entropy of a Haar state on ``d_a x d_b``, clamped at 0.

    >>> round(page_entropy(2, 2), 4)
    0.1931
    """
    if d_a < 1 or d_b < 1:
        raise DomainError("dimensions must be positive")
    lo, hi = min(d_a, d_b), max(d_a, d_b)
    return max(log(lo) - lo / (2 * hi), 0.0)


def avg_purity(d_a: int, d_b: int) -> float:
    """Exact Haar average of ``Tr rho_A^2`` (two-fold twirl)."""
    return (d_a + d_b) / (d_a * d_b + 1)


# --------------------------------------------------------------------------
# tripartite phase structure


def _counts(n_qubits) -> tuple[int, int, int]:
    n_a, n_b, n_c = (int(x) for x in n_qubits)
    if min(n_a, n_b, n_c) < 0 or n_a + n_b + n_c == 0:
        raise DomainError(f"invalid qubit counts {n_qubits}")
    return n_a, n_b, n_c


def _phase_of_counts(n_a: int, n_b: int, n_c: int) -> tuple[str, bool]:
    n = n_a + n_b + n_c
    if 2 * n_c > n:
        return PPT, False
    if 2 * max(n_a, n_b) > n:
        return ME, False
    return ES, 2 * max(n_a, n_b, n_c) == n


def avg_cmi(n_qubits) -> Prediction:
    """Leading-order ``I(A:B|C)`` averaged over the tripartite Haar ensemble.

    Parameters
    ----------
    n_qubits : tuple of int
        ``(N_A, N_B, N_C)``.

    Returns
    -------
    Prediction
        Value in nats and regime tag. Boundary points return the ES branch.
    """
    n_a, n_b, n_c = _counts(n_qubits)
    n = n_a + n_b + n_c
    regime, boundary = _phase_of_counts(n_a, n_b, n_c)
    if regime == PPT:
        value = 2.0 ** (n_a + n_b - n_c) / 2
    elif regime == ME:
        value = 2 * min(n_a, n_b) * LN2
    else:
        value = (n - 2 * n_c) * LN2
    return Prediction(value, regime, boundary)


def avg_markov_gap(n_qubits) -> Prediction:
    """Leading-order average Markov gap; A and B are swapped so that ``N_A <= N_B``."""
    n_a, n_b, n_c = _counts(n_qubits)
    if n_a > n_b:
        n_a, n_b = n_b, n_a
    n = n_a + n_b + n_c
    if n_a == 0:
        # empty party: S_R = I = 0 exactly
        regime, boundary = _phase_of_counts(n_a, n_b, n_c)
        return Prediction(0.0, regime, boundary, "exact")
    if 2 * n_c > n:
        value = 2.0 ** (n_a + n_b) / (4 * 2.0**n_c) * (n - 2 * n_b) * LN2
        return Prediction(value, PPT)
    if 2 * n_b > n:
        return Prediction(2.0 ** (n_a + n_c) / (2 * 2.0**n_b), ME)
    boundary = 2 * n_b == n or 2 * n_c == n
    return Prediction((n - 2 * n_b) * LN2, ES, boundary)


def avg_log_negativity(n_qubits) -> Prediction:
    """Bell-pair-model ``E_N(A:B)``: the number of A-B Bell pairs times ``ln 2``."""
    n_a, n_b, n_c = _counts(n_qubits)
    n = n_a + n_b + n_c
    regime, boundary = _phase_of_counts(n_a, n_b, n_c)
    if regime == PPT:
        pairs = 0.0
    elif regime == ME:
        pairs = float(min(n_a, n_b))
    else:
        pairs = (n - 2 * n_c) / 2
    return Prediction(pairs * LN2, regime, boundary)


def reflected_p0(d_a: int, d_b: int, d_c: int) -> float:
    """Weight of the disconnected saddle; the switch at ``D_AB = D_C`` is a convention."""
    d_ab = d_a * d_b
    if d_ab <= d_c:
        return 1.0 - d_ab / (4.0 * d_c)
    return d_c / d_ab


def avg_reflected_entropy(d_a: int, d_b: int, d_c: int) -> float:
    """Leading-order average reflected entropy ``S_R(A:B)`` in nats.

    The formula assumes ``d_a <= d_b``; larger ``d_a`` is swapped in.
    """
    if min(d_a, d_b, d_c) < 1:
        raise DomainError("dimensions must be positive")
    if d_a > d_b:
        d_a, d_b = d_b, d_a
    p0 = min(reflected_p0(d_a, d_b, d_c), 1.0)
    p1 = 1.0 - p0

    def xlogx(p):
        return p * log(p) if p > 0 else 0.0

    return -xlogx(p0) - xlogx(p1) + p1 * (log(d_a**2) - d_a**2 / (2.0 * d_b**2))


def thresholds(d_a: int, d_b: int, n_a: float, n_b: float,
               c: float = SEP_C_LOW, big_c: float = SEP_C_HIGH) -> ThresholdSet:
    """PPT and separability thresholds; ``c, big_c`` bracket the unknown s_SEP constant."""
    if d_a < 1 or d_b < 1 or not (0 <= n_a <= 1 and 0 <= n_b <= 1):
        raise DomainError("invalid dimensions or proportions")
    base = d_a * d_b * min(d_a, d_b)
    return ThresholdSet(
        s_ppt=4 * d_a * d_b,
        s_sep_low=c * base,
        s_sep_high=big_c * base * log(d_a * d_b) ** 2,
        n_ppt=0.5,
        n_sep=(1 + min(n_a, n_b)) / 2,
    )


def classify_phase(n_a: float, n_b: float, n_c: float, tol: float = 1e-12) -> PhaseLabel:
    """Phase label of fixed proportions ``(n_a, n_b, n_c)``."""
    if min(n_a, n_b, n_c) < -tol or abs(n_a + n_b + n_c - 1) > tol:
        raise DomainError(f"proportions {(n_a, n_b, n_c)} do not lie on the simplex")
    n_sep = (1 + min(n_a, n_b)) / 2
    separable = n_c > n_sep + tol
    if n_c > 0.5 + tol:
        return PhaseLabel(PPT, separable=separable)
    if max(n_a, n_b) > 0.5 + tol:
        return PhaseLabel(ME)
    boundary = abs(max(n_a, n_b, n_c) - 0.5) <= tol
    return PhaseLabel(ES, boundary=boundary)


def classify_counts(n_qubits) -> PhaseLabel:
    """Phase label of integer qubit counts, with exact boundary detection."""
    n_a, n_b, n_c = _counts(n_qubits)
    n = n_a + n_b + n_c
    regime, boundary = _phase_of_counts(n_a, n_b, n_c)
    separable = regime == PPT and 2 * n_c > n + min(n_a, n_b)
    return PhaseLabel(regime, boundary=boundary, separable=separable)


# --------------------------------------------------------------------------
# Marchenko-Pastur law


def _mp_check(c: float, tau: float):
    if c <= 0 or tau <= 0:
        raise DomainError(f"MP parameters must be positive, got c={c}, tau={tau}")


def mp_edges(c: float, tau: float) -> tuple[float, float]:
    _mp_check(c, tau)
    return tau * (1 - sqrt(c)) ** 2, tau * (1 + sqrt(c)) ** 2


def mp_atom(c: float) -> float:
    return max(1.0 - c, 0.0)


def mp_density(lam, c: float, tau: float):
    """Continuous part of the MP law; the atom ``mp_atom(c)`` at 0 is separate."""
    _mp_check(c, tau)
    lam = np.asarray(lam, dtype=float)
    lo, hi = mp_edges(c, tau)
    inside = (lam > lo) & (lam < hi) & (lam > 0)
    safe = np.where(inside, lam, 1.0)
    disc = np.maximum(4 * c * tau**2 - (safe - c * tau - tau) ** 2, 0.0)
    out = np.where(inside, np.sqrt(disc) / (2 * pi * tau * safe), 0.0)
    return float(out) if out.ndim == 0 else out


def _mp_table(c: float, tau: float, n: int = 20001):
    # lam = m - r cos(theta) turns the edge singularities into a smooth integrand
    m, r = tau * (1 + c), 2 * tau * sqrt(c)
    theta = np.linspace(0.0, pi, n)
    lam = m - r * np.cos(theta)
    integrand = r**2 * np.sin(theta) ** 2 / (2 * pi * tau * np.maximum(m - r * np.cos(theta), 1e-300))
    if c == 1:
        integrand[0] = r**2 * 2 / (2 * pi * tau * r)  # limit sin^2/(1-cos) -> 2
    cont = cumulative_simpson(integrand, x=theta, initial=0.0)
    return lam, cont


def mp_cdf(lam, c: float, tau: float):
    """Cumulative MP distribution including the atom at 0."""
    _mp_check(c, tau)
    grid, cont = _mp_table(c, tau)
    lam = np.asarray(lam, dtype=float)
    out = np.where(lam < 0, 0.0, mp_atom(c) + np.interp(lam, grid, cont, left=0.0, right=cont[-1]))
    return float(out) if out.ndim == 0 else out


def mp_quantile(u, c: float, tau: float):
    """Inverse of :func:`mp_cdf` (0 for ``u`` inside the atom)."""
    grid, cont = _mp_table(c, tau)
    atom = mp_atom(c)
    u = np.asarray(u, dtype=float)
    x = np.interp(u - atom, cont, grid)
    return np.where(u <= atom, 0.0, x)


def mp_ks_distance(spectrum, c: float, tau: float) -> float:
    """Kolmogorov-Smirnov distance between an empirical spectrum and the MP law."""
    x = np.sort(np.asarray(spectrum, dtype=float).ravel())
    if x.size == 0:
        raise DomainError("empty spectrum")
    x = np.where(np.abs(x) < 1e-12, 0.0, x)
    f = mp_cdf(x, c, tau)
    # left limit of the model CDF; differs from f only at the atom
    f_left = np.where(x == 0.0, f - mp_atom(c), f)
    n = x.size
    # both CDFs are right-continuous: compare at and just before each jump
    upper = np.searchsorted(x, x, side="right") / n
    lower = np.searchsorted(x, x, side="left") / n
    return float(max(np.max(np.abs(upper - f)), np.max(np.abs(f_left - lower))))


# --------------------------------------------------------------------------
# concentration


def levy_bound(epsilon: float, lipschitz: float, dim: int) -> float:
    """``2 exp(-2 dim (epsilon/L)^2)`` clamped to ``[0, 1]``."""
    if epsilon <= 0 or lipschitz <= 0 or dim < 1:
        raise DomainError("levy_bound needs epsilon > 0, lipschitz > 0, dim >= 1")
    return min(1.0, 2.0 * exp(-2.0 * dim * (epsilon / lipschitz) ** 2))


def lipschitz_constants(d_a: int, d_total: int) -> dict[str, float]:
    """Lipschitz constants of ``S_A``, ``I(A:B)`` and ``h(A:B)`` on the unit sphere."""
    if not 1 <= d_a <= d_total:
        raise DomainError(f"need 1 <= d_a <= d_total, got {d_a}, {d_total}")
    return {
        "entropy": 2 * log(d_a),
        "mutual_info": 2 * log(d_total),
        "markov_gap": 2 * (2 * log(d_a) + log(d_total)),
    }


def mean_median_gap_bound(lipschitz: float, dim: float) -> float:
    if lipschitz <= 0 or dim <= 0:
        raise DomainError("inputs must be positive")
    return lipschitz * sqrt(2 * pi / dim)
