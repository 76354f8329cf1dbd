"""Entropies, negativity, PPT tests, canonical purification and the Markov gap.

All values are in nats.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import log

import numpy as np

from .errors import CapacityError, DomainError, NumericError
from .qstate import (
    DensityMatrix,
    PureState,
    Tripartition,
    _matricize,
    partial_trace,
    partial_transpose,
)

EIG_CLIP = 1e-12
PSD_TOL = 1e-10
PPT_TOL_PER_DIM = 1e-10
MAX_PURIFY_DIM = 2**10
MAX_REFLECTED_SIDE = 2**12


@dataclass(frozen=True)
class EntropyValue:
    """Entropy in nats; ``bits`` converts."""

    nats: float

    @property
    def bits(self) -> float:
        return self.nats / log(2)

    def __float__(self) -> float:
        return float(self.nats)


@dataclass(frozen=True)
class MeasureReport:
    entropy_a: EntropyValue
    entropy_b: EntropyValue
    entropy_ab: EntropyValue
    mutual_info: float
    cmi: float
    log_negativity: float
    reflected_entropy: float
    markov_gap: float
    min_pt_eigenvalue: float


# --------------------------------------------------------------------------
# spectra and entropies


def _eigvalsh(m: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.eigvalsh(m)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigensolver failed on a {m.shape[0]}x{m.shape[0]} matrix "
                           f"(cond estimate {np.linalg.cond(m):.3g})") from exc


def _svals(m: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.svd(m, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"SVD failed on a matrix of shape {m.shape}") from exc


def spectrum(dm: DensityMatrix) -> np.ndarray:
    """Eigenvalues of ``dm`` in ascending order (uses the low-rank factor if present)."""
    if dm.factor is not None:
        s = _svals(dm.factor) ** 2
        lam = np.concatenate([np.zeros(dm.dim - s.size), s[::-1]])
    else:
        lam = _eigvalsh(dm.entries)
    if lam[0] < -PSD_TOL:
        raise DomainError(f"density matrix has eigenvalue {lam[0]:.3g} < -{PSD_TOL}")
    return lam


def _entropy_from_eigs(lam: np.ndarray) -> float:
    lam = lam[lam > EIG_CLIP]
    return float(max(-np.sum(lam * np.log(lam)), 0.0))


def von_neumann_entropy(dm: DensityMatrix) -> EntropyValue:
    """``-sum(l log l)`` over eigenvalues above the clip threshold.

    >>> round(von_neumann_entropy(DensityMatrix(np.eye(4) / 4, (4,))).nats, 4)
    1.3863
    """
    return EntropyValue(_entropy_from_eigs(spectrum(dm)))


def entanglement_entropy(state: PureState, sites) -> float:
    """Entropy of ``sites`` of a pure state, from the Schmidt values."""
    sites = sorted(set(int(s) for s in sites))
    if not sites or len(sites) == state.n_sites:
        return 0.0
    m = _matricize(state.tensor(), sites)
    return _entropy_from_eigs(_svals(m) ** 2)


def shannon_entropy(p) -> float:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise DomainError("probability vector must be a non-empty 1-d array")
    if np.any(p < 0):
        raise DomainError(f"negative probabilities in {p}")
    if abs(p.sum() - 1.0) > 1e-9:
        raise DomainError(f"probabilities sum to {p.sum()!r}")
    q = p[p > 0]
    return float(max(-np.sum(q * np.log(q)), 0.0))


def mutual_information(state: PureState, part: Tripartition) -> float:
    """``S_A + S_B - S_AB`` of a tripartite pure state."""
    part.check(state)
    sa = entanglement_entropy(state, part.sites_a)
    sb = entanglement_entropy(state, part.sites_b)
    sab = entanglement_entropy(state, part.sites_a + part.sites_b)
    return sa + sb - sab


def conditional_mutual_information(state: PureState, part: Tripartition) -> float:
    """``S(AC) + S(BC) - S(C) - S(ABC)``; equals ``I(A:B)`` for pure inputs."""
    part.check(state)
    a, b, c = part.sites_a, part.sites_b, part.sites_c
    return (entanglement_entropy(state, a + c) + entanglement_entropy(state, b + c)
            - entanglement_entropy(state, c) - entanglement_entropy(state, a + b + c))


def bipartite_mutual_information(dm: DensityMatrix) -> float:
    """``S_A + S_B - S_AB`` for a two-site matrix."""
    if dm.n_sites != 2:
        raise DomainError("expected a density matrix over exactly two sites [A, B]")
    sa = von_neumann_entropy(partial_trace(dm, [0])).nats
    sb = von_neumann_entropy(partial_trace(dm, [1])).nats
    return sa + sb - von_neumann_entropy(dm).nats


# --------------------------------------------------------------------------
# partial transpose


def pt_spectrum(dm: DensityMatrix, cut) -> np.ndarray:
    """Real spectrum of the partial transpose on ``cut``, descending."""
    return _eigvalsh(partial_transpose(dm, cut))[::-1]


def log_negativity(dm: DensityMatrix, cut) -> float:
    """``log ||rho^{T_cut}||_1``."""
    return float(max(np.log(np.sum(np.abs(pt_spectrum(dm, cut)))), 0.0))


def ppt_tolerance(dim: int) -> float:
    return PPT_TOL_PER_DIM * dim


def is_ppt(dm: DensityMatrix, cut) -> tuple[bool, float]:
    """PPT test; returns the verdict and the smallest PT eigenvalue."""
    lam_min = float(pt_spectrum(dm, cut)[-1])
    return lam_min >= -ppt_tolerance(dm.dim), lam_min


# --------------------------------------------------------------------------
# canonical purification


def _eig_factor(dm: DensityMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Eigenpairs ``(lam, vecs)`` of the support of ``dm``, tiny weights dropped."""
    if dm.factor is not None:
        try:
            u, s, _ = np.linalg.svd(dm.factor, full_matrices=False)
        except np.linalg.LinAlgError as exc:
            raise NumericError("SVD of density-matrix factor failed") from exc
        lam, vecs = s**2, u
    else:
        try:
            lam, vecs = np.linalg.eigh(dm.entries)
        except np.linalg.LinAlgError as exc:
            raise NumericError(f"eigh failed on a {dm.dim}x{dm.dim} matrix") from exc
        if lam[0] < -PSD_TOL:
            raise DomainError(f"density matrix is not positive: eigenvalue {lam[0]:.3g}")
    keep = lam > EIG_CLIP
    return lam[keep], vecs[:, keep]


def _sqrt_matrix(dm: DensityMatrix) -> np.ndarray:
    lam, vecs = _eig_factor(dm)
    return (vecs * np.sqrt(lam)) @ vecs.conj().T


def canonical_purification(dm: DensityMatrix) -> PureState:
    """The vectorised square root ``|sqrt(rho)>`` on the doubled register.

    Output sites are ``dm.dims`` followed by the mirror copy, so a two-site
    input gives ``[d_A, d_B, d_A, d_B]`` and tracing the last two sites
    recovers ``dm``.
    """
    if dm.dim > MAX_PURIFY_DIM:
        raise CapacityError(f"purification of a {dm.dim}-dim matrix exceeds {MAX_PURIFY_DIM}")
    root = _sqrt_matrix(dm)
    # amplitude index i + D*j carries sqrt(rho)[i, j]
    amps = root.ravel(order="F")
    return PureState.from_vector(amps, dm.dims + dm.dims)


def reflected_entropy(dm: DensityMatrix) -> float:
    """``S_R(A:B)``: entropy of ``A Abar`` in the canonical purification.

    The reduced matrix is formed on whichever of ``A Abar`` or ``B Bbar``
    is smaller (their spectra coincide), so either labelling works.
    """
    if dm.n_sites != 2:
        raise DomainError("reflected entropy needs a density matrix over [A, B]")
    d_a, d_b = dm.dims
    if min(d_a, d_b) ** 2 > MAX_REFLECTED_SIDE:
        raise CapacityError(f"reduced mirror system of dimension {min(d_a, d_b) ** 2} exceeds "
                            f"{MAX_REFLECTED_SIDE}")
    psi = canonical_purification(dm)
    m = _matricize(psi.tensor(), [0, 2])
    if m.shape[0] > m.shape[1]:
        m = m.T
    rho_small = m @ m.conj().T
    return _entropy_from_eigs(_eigvalsh((rho_small + rho_small.conj().T) / 2))


def markov_gap(dm: DensityMatrix) -> float:
    """``h(A:B) = S_R(A:B) - I(A:B)``."""
    return reflected_entropy(dm) - bipartite_mutual_information(dm)


def measure_report(state: PureState, part: Tripartition) -> MeasureReport:
    """All pairwise A:B measures of a tripartite pure state."""
    rho_ab = marginal_ab(state, part)
    sa = entanglement_entropy(state, part.sites_a)
    sb = entanglement_entropy(state, part.sites_b)
    sab = entanglement_entropy(state, part.sites_a + part.sites_b)
    mi = sa + sb - sab
    sr = reflected_entropy(rho_ab)
    pts = pt_spectrum(rho_ab, [1])
    return MeasureReport(
        entropy_a=EntropyValue(sa),
        entropy_b=EntropyValue(sb),
        entropy_ab=EntropyValue(sab),
        mutual_info=mi,
        cmi=conditional_mutual_information(state, part),
        log_negativity=float(max(np.log(np.sum(np.abs(pts))), 0.0)),
        reflected_entropy=sr,
        markov_gap=sr - mi,
        min_pt_eigenvalue=float(pts[-1]),
    )


def marginal_ab(state: PureState, part: Tripartition) -> DensityMatrix:
    """``rho_AB`` of a qubit tripartite state, regrouped as two sites."""
    part.check(state)
    rho = partial_trace(state, part.sites_a + part.sites_b)
    return rho.regroup((2**part.n_a, 2**part.n_b))


__all__ = [
    "EntropyValue", "MeasureReport", "spectrum", "von_neumann_entropy", "entanglement_entropy",
    "shannon_entropy", "mutual_information", "conditional_mutual_information",
    "bipartite_mutual_information", "pt_spectrum", "log_negativity", "is_ppt", "ppt_tolerance",
    "canonical_purification", "reflected_entropy", "markov_gap", "measure_report", "marginal_ab",
]
