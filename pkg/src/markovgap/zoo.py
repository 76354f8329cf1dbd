"""Triangle states, sums of triangle states (SOTS) and stabilizer-model states.

A triangle state is ``|ab>_{A1 B2} |bc>_{B1 C2} |ca>_{C1 A2}``. Components
are given as coefficient matrices, e.g. ``ab[a1, b2]``. Each of the six
sub-registers is padded separately to a power of two, and the qubits are
ordered ``A = (A1, A2)``, ``B = (B1, B2)``, ``C = (C1, C2)`` with the first
sub-register on the lowest qubits. Padding amplitudes are zero.

A SOTS stacks triangle components of several sectors into disjoint index
ranges of the sub-registers. The default layout stacks every sub-register,
so every sub-register carries the sector label.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import ceil, log2
from typing import Sequence

import numpy as np

from .errors import CapacityError, ConstructionError, DomainError
from .measures import entanglement_entropy, shannon_entropy
from .qstate import (
    PureState,
    SeedTree,
    Tripartition,
    as_seed,
    permute_sites,
    tensor_embed,
    tensor_product,
)

SUBREGISTERS = ("a1", "a2", "b1", "b2", "c1", "c2")
PARTY_SUBREGISTERS = {"A": (0, 1), "B": (2, 3), "C": (4, 5)}
MAX_MODEL_QUBITS = 20


def _qubits_for(d: int) -> int:
    return 0 if d <= 1 else int(ceil(log2(d)))


# --------------------------------------------------------------------------
# small named states


def basis_state(bits: Sequence[int]) -> PureState:
    """Computational basis state; ``bits[k]`` is qubit ``k``."""
    idx = sum(int(b) << k for k, b in enumerate(bits))
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[idx] = 1
    return PureState(v, (2,) * len(bits))


def bell_state() -> PureState:
    return PureState(np.array([1, 0, 0, 1]) / np.sqrt(2), (2, 2))


def ghz_state(n: int) -> PureState:
    v = np.zeros(2**n, dtype=complex)
    v[0] = v[-1] = 1 / np.sqrt(2)
    return PureState(v, (2,) * n)


def w_state(n: int) -> PureState:
    v = np.zeros(2**n, dtype=complex)
    v[[1 << k for k in range(n)]] = 1 / np.sqrt(n)
    return PureState(v, (2,) * n)


# --------------------------------------------------------------------------
# triangle states


def _coeff(m) -> np.ndarray:
    m = np.atleast_2d(np.asarray(m, dtype=np.complex128))
    if m.ndim != 2:
        raise ConstructionError("component must be a coefficient matrix")
    norm = np.linalg.norm(m)
    if abs(norm - 1) > 1e-12:
        raise ConstructionError(f"component is not normalised (norm {norm!r})")
    return m


@dataclass(frozen=True, eq=False)
class TriangleSpec:
    """Three bipartite components as coefficient matrices.

    ``ab[a1, b2]``, ``bc[b1, c2]`` and ``ca[c1, a2]``; a 1x1 matrix ``[[1]]``
    is a trivial component.
    """

    ab: np.ndarray
    bc: np.ndarray
    ca: np.ndarray

    def __post_init__(self):
        for name in ("ab", "bc", "ca"):
            object.__setattr__(self, name, _coeff(getattr(self, name)))

    @classmethod
    def from_states(cls, ab: PureState, bc: PureState, ca: PureState) -> "TriangleSpec":
        """Build from two-site states; site 0 of ``ab`` is A1, site 1 is B2, etc."""
        mats = []
        for s in (ab, bc, ca):
            if s.n_sites != 2:
                raise ConstructionError("each component must be a two-site state")
            mats.append(s.tensor())
        return cls(*mats)

    @property
    def local_dims(self) -> tuple[int, int, int, int, int, int]:
        """Dimensions of ``(a1, a2, b1, b2, c1, c2)``."""
        return (self.ab.shape[0], self.ca.shape[1], self.bc.shape[0],
                self.ab.shape[1], self.ca.shape[0], self.bc.shape[1])

    def tensor(self) -> np.ndarray:
        """Amplitudes ``T[a1, a2, b1, b2, c1, c2]``."""
        return np.einsum("ad,cf,eb->abcdef", self.ab, self.bc, self.ca)

    def component_entropies(self) -> tuple[float, float, float]:
        """Entanglement entropies of the AB, BC and CA components."""
        return tuple(_schmidt_entropy(m) for m in (self.ab, self.bc, self.ca))


def _schmidt_entropy(m: np.ndarray) -> float:
    s2 = np.linalg.svd(m, compute_uv=False) ** 2
    s2 = s2[s2 > 1e-12]
    return float(max(-np.sum(s2 * np.log(s2)), 0.0))


def _to_qubits(t: np.ndarray, sub_dims: Sequence[int]) -> PureState:
    """Zero-pad each sub-register to a power of two and split it into qubits."""
    padded = [2 ** _qubits_for(d) for d in sub_dims]
    out = np.zeros(padded, dtype=np.complex128)
    out[tuple(slice(0, d) for d in t.shape)] = t
    n = sum(_qubits_for(d) for d in sub_dims)
    if n == 0:
        raise ConstructionError("state has no qubits")
    return PureState.from_tensor(out).regroup((2,) * n)


def _partition(sub_dims: Sequence[int]) -> Tripartition:
    q = [_qubits_for(d) for d in sub_dims]
    return Tripartition(q[0] + q[1], q[2] + q[3], q[4] + q[5], c_split=(q[4], q[5]))


def triangle_state(spec: TriangleSpec) -> PureState:
    """Dense triangle state on the qubit register of :func:`triangle_partition`."""
    return _to_qubits(spec.tensor(), spec.local_dims)


def triangle_partition(spec: TriangleSpec) -> Tripartition:
    return _partition(spec.local_dims)


# --------------------------------------------------------------------------
# sums of triangle states


@dataclass(frozen=True, eq=False)
class SotsSpec:
    """Weighted sectors of triangle components plus their placement.

    Parameters
    ----------
    weights : sequence of float
        Sector probabilities ``p_l``.
    components : sequence of TriangleSpec
        One triangle per sector.
    offsets : sequence of 6-tuples, optional
        Start index of sector ``l`` in each sub-register
        ``(a1, a2, b1, b2, c1, c2)``. Defaults to stacking the sectors in
        every sub-register.
    """

    weights: tuple[float, ...]
    components: tuple[TriangleSpec, ...]
    offsets: tuple[tuple[int, ...], ...] | None = None
    sub_dims: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        p = np.asarray(self.weights, dtype=float)
        comps = tuple(self.components)
        if p.ndim != 1 or p.size != len(comps) or p.size == 0:
            raise ConstructionError("need one weight per sector")
        if np.any(p < 0) or abs(p.sum() - 1) > 1e-9:
            raise ConstructionError(f"weights must be a probability vector, got {p}")
        object.__setattr__(self, "weights", tuple(float(x) for x in p))
        object.__setattr__(self, "components", comps)

        dims = np.array([c.local_dims for c in comps])  # (L, 6)
        if self.offsets is None:
            offs = np.vstack([np.zeros(6, dtype=int), np.cumsum(dims, axis=0)[:-1]])
        else:
            offs = np.asarray(self.offsets, dtype=int)
            if offs.shape != dims.shape or np.any(offs < 0):
                raise ConstructionError("offsets must hold six non-negative ints per sector")
        object.__setattr__(self, "offsets", tuple(tuple(int(x) for x in row) for row in offs))
        object.__setattr__(self, "sub_dims", tuple(int(x) for x in (offs + dims).max(axis=0)))

        # each party's sector subspaces must be mutually orthogonal
        for party, subs in PARTY_SUBREGISTERS.items():
            for i in range(len(comps)):
                for j in range(i + 1, len(comps)):
                    if all(offs[i, s] < offs[j, s] + dims[j, s] and offs[j, s] < offs[i, s] + dims[i, s]
                           for s in subs):
                        raise ConstructionError(f"sectors {i} and {j} overlap on party {party}")

    @property
    def n_sectors(self) -> int:
        return len(self.components)

    def partition(self) -> Tripartition:
        """Qubit tripartition with the aligned ``C = C1 C2`` split."""
        return _partition(self.sub_dims)

    def label_carriers(self) -> tuple[bool, ...]:
        """Whether each sub-register alone distinguishes every pair of sectors."""
        dims = np.array([c.local_dims for c in self.components])
        offs = np.asarray(self.offsets)
        out = []
        for s in range(6):
            ok = all(not (offs[i, s] < offs[j, s] + dims[j, s] and offs[j, s] < offs[i, s] + dims[i, s])
                     for i in range(len(dims)) for j in range(i + 1, len(dims)))
            out.append(ok)
        return tuple(out)


def sots_state(spec: SotsSpec) -> PureState:
    """Dense ``sum_l sqrt(p_l) |triangle_l>`` on the qubit register of ``spec.partition()``."""
    blocks = [PureState.from_tensor(c.tensor()) for c in spec.components]
    dims = [2 ** _qubits_for(d) for d in spec.sub_dims]
    embedded = tensor_embed(blocks, spec.offsets, dims, spec.weights)
    n = spec.partition().total
    if n == 0:
        raise ConstructionError("state has no qubits")
    return embedded.regroup((2,) * n)


@dataclass(frozen=True)
class SotsAnalytic:
    g: float
    s_ab: float
    s_bc: float
    s_ac: float
    entropy_a: float
    entropy_b: float
    entropy_c: float
    mutual_ab: float


def sots_analytic(spec: SotsSpec) -> SotsAnalytic:
    """Entropies of a SOTS from its sector data alone.

    ``g = H(p)``, ``S_{X:Y} = sum_l p_l S(component_l)``, each party's entropy
    is the sum of its two pair entropies plus ``g``, and ``I(A:B) = 2 S_{A:B} + g``.
    """
    p = np.array(spec.weights)
    ent = np.array([c.component_entropies() for c in spec.components])  # ab, bc, ca
    s_ab, s_bc, s_ac = (float(x) for x in p @ ent)
    g = shannon_entropy(p)
    return SotsAnalytic(
        g=g, s_ab=s_ab, s_bc=s_bc, s_ac=s_ac,
        entropy_a=s_ab + s_ac + g,
        entropy_b=s_ab + s_bc + g,
        entropy_c=s_bc + s_ac + g,
        mutual_ab=2 * s_ab + g,
    )


def sots_marginal_is_separable(spec: SotsSpec, tol: float = 1e-10) -> bool:
    """True iff every populated sector has a product ``A1 B2`` component."""
    for p, comp in zip(spec.weights, spec.components):
        if p <= 0:
            continue
        s = np.linalg.svd(comp.ab, compute_uv=False)
        if s[0] ** 2 < 1 - tol:
            return False
    return True


def ghz_sots_spec(weights=(0.5, 0.5), layout: str = "stacked") -> SotsSpec:
    """GHZ-type SOTS with trivial components in every sector.

    ``layout="stacked"`` puts the label on all six sub-registers (two qubits
    per party); ``"compact"`` uses only ``X1`` (one qubit per party for two
    sectors).
    """
    comps = [TriangleSpec([[1]], [[1]], [[1]]) for _ in weights]
    if layout == "stacked":
        return SotsSpec(weights, comps)
    if layout == "compact":
        offs = [(l, 0, l, 0, l, 0) for l in range(len(weights))]
        return SotsSpec(weights, comps, offs)
    raise DomainError(f"unknown layout {layout!r}")


def random_bipartite(d1: int, d2: int, rng: np.random.Generator, entangled: bool = True) -> np.ndarray:
    """Random unit coefficient matrix; rank one when ``entangled`` is false."""
    if entangled:
        m = rng.standard_normal((d1, d2)) + 1j * rng.standard_normal((d1, d2))
    else:
        u = rng.standard_normal(d1) + 1j * rng.standard_normal(d1)
        v = rng.standard_normal(d2) + 1j * rng.standard_normal(d2)
        m = np.outer(u, v)
    return m / np.linalg.norm(m)


def random_sots_spec(seed: SeedTree | int, max_qubits: int = 8, max_sectors: int = 2) -> SotsSpec:
    """Random stacked-layout SOTS; every party gets at least one qubit."""
    rng = as_seed(seed).generator()
    n_sec = int(rng.integers(1, max_sectors + 1))
    p_big = 0.5 if n_sec == 1 else 0.15
    while True:
        comps = []
        for _ in range(n_sec):
            mats = []
            for _pair in range(3):
                d1, d2 = (2 if rng.random() < p_big else 1 for _ in range(2))
                mats.append(random_bipartite(d1, d2, rng, entangled=bool(rng.random() < 0.7)))
            comps.append(TriangleSpec(*mats))
        weights = rng.dirichlet(np.ones(n_sec))
        spec = SotsSpec(weights, comps)
        part = spec.partition()
        if min(part.n_a, part.n_b, part.n_c) >= 1 and part.total <= max_qubits:
            return spec


# --------------------------------------------------------------------------
# stabilizer model states


@dataclass(frozen=True)
class StabModelSpec:
    """Counts of A-B, B-C, A-C Bell pairs, GHZ triples and local ``|0>`` qubits."""

    e_ab: int = 0
    e_bc: int = 0
    e_ac: int = 0
    g_abc: int = 0
    s_a: int = 0
    s_b: int = 0
    s_c: int = 0

    def __post_init__(self):
        if min(self.as_tuple()) < 0:
            raise DomainError(f"counts must be non-negative: {self}")

    def as_tuple(self) -> tuple[int, ...]:
        return (self.e_ab, self.e_bc, self.e_ac, self.g_abc, self.s_a, self.s_b, self.s_c)

    @property
    def n_a(self) -> int:
        return self.e_ab + self.e_ac + self.g_abc + self.s_a

    @property
    def n_b(self) -> int:
        return self.e_ab + self.e_bc + self.g_abc + self.s_b

    @property
    def n_c(self) -> int:
        return self.e_bc + self.e_ac + self.g_abc + self.s_c

    def partition(self) -> Tripartition:
        return Tripartition(self.n_a, self.n_b, self.n_c)

    def entropies(self) -> tuple[int, int, int]:
        """``S_A, S_B, S_C`` in units of ``ln 2``."""
        return (self.e_ab + self.e_ac + self.g_abc,
                self.e_ab + self.e_bc + self.g_abc,
                self.e_bc + self.e_ac + self.g_abc)


def stabilizer_model_state(spec: StabModelSpec) -> PureState:
    """GHZ/Bell/local-qubit assembly routed to A, B and C.

    Within each party the qubits are ordered: Bell halves (to the lower-named
    partner first), GHZ legs, then local qubits.
    """
    part = spec.partition()
    if part.total > MAX_MODEL_QUBITS:
        raise CapacityError(f"{part.total} qubits exceed {MAX_MODEL_QUBITS}")
    if part.total == 0:
        raise ConstructionError("empty register")
    nxt = {"A": 0, "B": part.n_a, "C": part.n_a + part.n_b}

    def take(party):
        q = nxt[party]
        nxt[party] += 1
        return q

    factors, positions = [], []
    for _ in range(spec.e_ab):
        factors.append(bell_state())
        positions += [take("A"), take("B")]
    for _ in range(spec.e_ac):
        factors.append(bell_state())
        positions += [take("A"), take("C")]
    for _ in range(spec.e_bc):
        factors.append(bell_state())
        positions += [take("B"), take("C")]
    for _ in range(spec.g_abc):
        factors.append(ghz_state(3))
        positions += [take("A"), take("B"), take("C")]
    for party, count in (("A", spec.s_a), ("B", spec.s_b), ("C", spec.s_c)):
        for _ in range(count):
            factors.append(basis_state([0]))
            positions.append(take(party))
    state = tensor_product(*factors)
    return permute_sites(state, list(np.argsort(positions)))


# --------------------------------------------------------------------------
# monogamy of mutual information


def mmi_deficit(state: PureState, part: Tripartition) -> float:
    """``I(A:BC1) - I(A:B) - I(A:C1)``; needs ``part.c_split``."""
    if part.c_split is None:
        raise DomainError("mmi_deficit needs a C1/C2 split")
    part.check(state)
    a, b, c1 = part.sites_a, part.sites_b, part.sites_c1

    def s(sites):
        return entanglement_entropy(state, sites)

    sa = s(a)
    i_a_bc1 = sa + s(b + c1) - s(a + b + c1)
    i_ab = sa + s(b) - s(a + b)
    i_ac1 = sa + s(c1) - s(a + c1)
    return i_a_bc1 - i_ab - i_ac1
