"""Stabilizer states: random sampling, GF(2) entropies and GHZ/EPR decomposition.

Tableau rows use the ``X | Z`` block layout. Row ``(x, z)`` with sign bit
``r`` is the Hermitian Pauli ``(-1)^r i^{x.z} X^x Z^z``, so ``x_j = z_j = 1``
means ``Y`` on qubit ``j``. Qubit ``j`` is bit ``j`` of the dense index.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import log

import numpy as np

from .errors import CapacityError, ConsistencyError, DomainError
from .measures import log_negativity
from .qstate import DensityMatrix, PureState, SeedTree, Tripartition, as_seed

MAX_QUBITS = 64
MAX_DENSE_QUBITS = 12
MAX_DENSE_AB_QUBITS = 10
INTEGER_TOL = 1e-6

_PAULI_CHARS = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_PAULI_BITS = {v: k for k, v in _PAULI_CHARS.items()}


# --------------------------------------------------------------------------
# GF(2) helpers


def _row_int(bits) -> int:
    out = 0
    for k, b in enumerate(bits):
        if b:
            out |= 1 << k
    return out


def gf2_rank(rows) -> int:
    """Rank over GF(2) of rows given as Python ints or 0/1 sequences."""
    basis: dict[int, int] = {}
    for r in rows:
        r = r if isinstance(r, int) else _row_int(r)
        while r:
            h = r.bit_length() - 1
            if h in basis:
                r ^= basis[h]
            else:
                basis[h] = r
                break
    return len(basis)


# --------------------------------------------------------------------------
# tableau


@dataclass(frozen=True, eq=False)
class StabilizerTableau:
    """Generators of an ``n``-qubit stabilizer state with sign bits."""

    n: int
    generators: np.ndarray
    phases: np.ndarray

    def __post_init__(self):
        n = int(self.n)
        if not 1 <= n <= MAX_QUBITS:
            raise DomainError(f"qubit count must be in 1..{MAX_QUBITS}, got {n}")
        gens = np.array(self.generators, dtype=np.uint8) % 2
        ph = np.array(self.phases, dtype=np.uint8).ravel() % 2
        if gens.shape != (n, 2 * n) or ph.shape != (n,):
            raise DomainError(f"expected an {n}x{2 * n} generator matrix and {n} phases")
        if gf2_rank(list(gens)) != n:
            raise DomainError("generators are not independent")
        omega = (gens[:, :n].astype(int) @ gens[:, n:].T.astype(int)
                 + gens[:, n:].astype(int) @ gens[:, :n].T.astype(int)) % 2
        if np.any(omega):
            raise DomainError("generators do not commute")
        gens.setflags(write=False)
        ph.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "phases", ph)

    def __eq__(self, other):
        return (isinstance(other, StabilizerTableau) and self.n == other.n
                and np.array_equal(self.generators, other.generators)
                and np.array_equal(self.phases, other.phases))

    __hash__ = None

    @property
    def x(self) -> np.ndarray:
        return self.generators[:, : self.n]

    @property
    def z(self) -> np.ndarray:
        return self.generators[:, self.n:]

    def to_text(self) -> str:
        """One generator per line, ``+XZIY`` style; character ``j`` is qubit ``j``."""
        lines = []
        for row, r in zip(self.generators, self.phases):
            body = "".join(_PAULI_CHARS[(int(row[j]), int(row[self.n + j]))] for j in range(self.n))
            lines.append(("-" if r else "+") + body)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str | list[str]) -> "StabilizerTableau":
        lines = text.split() if isinstance(text, str) else list(text)
        if not lines:
            raise DomainError("empty tableau text")
        n = len(lines[0].lstrip("+-"))
        gens = np.zeros((len(lines), 2 * n), dtype=np.uint8)
        phases = np.zeros(len(lines), dtype=np.uint8)
        for i, line in enumerate(lines):
            sign = "+"
            if line[0] in "+-":
                sign, line = line[0], line[1:]
            if len(line) != n:
                raise DomainError(f"generator {i} has length {len(line)}, expected {n}")
            phases[i] = sign == "-"
            for j, ch in enumerate(line.upper()):
                if ch not in _PAULI_BITS:
                    raise DomainError(f"bad Pauli character {ch!r}")
                gens[i, j], gens[i, n + j] = _PAULI_BITS[ch]
        return cls(n, gens, phases)


def zero_tableau(n: int) -> StabilizerTableau:
    """Tableau of ``|0...0>`` (generators ``Z_j``)."""
    gens = np.zeros((n, 2 * n), dtype=np.uint8)
    gens[np.arange(n), n + np.arange(n)] = 1
    return StabilizerTableau(n, gens, np.zeros(n, dtype=np.uint8))


# --------------------------------------------------------------------------
# uniform symplectic sampling (interleaved coordinates x0 z0 x1 z1 ...)


def _inner(v: np.ndarray, w: np.ndarray) -> int:
    return int((v[0::2] @ w[1::2] + v[1::2] @ w[0::2]) % 2)


def _transvect(k: np.ndarray, v: np.ndarray) -> np.ndarray:
    return (v + _inner(k, v) * k) % 2


def _find_transvection(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``(h1, h2)`` with ``y = Z_h2 Z_h1 x`` for symplectic transvections ``Z_h``."""
    zero = np.zeros_like(x)
    if np.array_equal(x, y):
        return zero, zero
    if _inner(x, y) == 1:
        return (x + y) % 2, zero
    nn = x.size
    z = np.zeros_like(x)
    pairs = [(2 * j, 2 * j + 1) for j in range(nn // 2)]
    for a, b in pairs:
        if (x[a] or x[b]) and (y[a] or y[b]):
            for cand in ((0, 1), (1, 0), (1, 1)):
                z[a], z[b] = cand
                if _inner(x, z) == 1 and _inner(y, z) == 1:
                    return (x + z) % 2, (z + y) % 2
                z[a] = z[b] = 0
    for a, b in pairs:
        if (x[a] or x[b]) and not (y[a] or y[b]):
            z[a], z[b] = (x[b], x[a]) if x[a] != x[b] else (1, 0)
            break
    for a, b in pairs:
        if (y[a] or y[b]) and not (x[a] or x[b]):
            z[a], z[b] = (y[b], y[a]) if y[a] != y[b] else (1, 0)
            break
    return (x + z) % 2, (z + y) % 2


def random_symplectic(n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform element of ``Sp(2n, GF(2))`` in interleaved coordinates.

    Rows ``2j`` and ``2j + 1`` are the images of ``X_j`` and ``Z_j``. Built
    recursively: the first symplectic pair is mapped to a uniformly random
    pair by transvections, then the rest is a uniform ``Sp(2n - 2)``.
    """
    nn = 2 * n
    while True:
        f1 = rng.integers(0, 2, nn, dtype=np.int64)
        if f1.any():
            break
    e1 = np.zeros(nn, dtype=np.int64)
    e1[0] = 1
    t1, t2 = _find_transvection(e1, f1)
    bits = rng.integers(0, 2, nn - 1, dtype=np.int64)
    eprime = e1.copy()
    eprime[2:] = bits[1:]
    h0 = _transvect(t2, _transvect(t1, eprime))
    if bits[0] == 1:
        f1 = np.zeros_like(f1)
    g = np.zeros((nn, nn), dtype=np.int64)
    g[0, 0] = g[1, 1] = 1
    if n > 1:
        g[2:, 2:] = random_symplectic(n - 1, rng)
    for j in range(nn):
        v = _transvect(t1, g[j])
        v = _transvect(t2, v)
        v = _transvect(h0, v)
        g[j] = _transvect(f1, v)
    return g


def is_symplectic(g: np.ndarray) -> bool:
    nn = g.shape[0]
    omega = np.zeros((nn, nn), dtype=np.int64)
    for j in range(0, nn, 2):
        omega[j, j + 1] = omega[j + 1, j] = 1
    return bool(np.array_equal((g @ omega @ g.T) % 2, omega))


def sample_random_stabilizer(n: int, seed: SeedTree | int) -> StabilizerTableau:
    """Uniformly random ``n``-qubit stabilizer state.

    A uniform symplectic matrix maps the ``Z_j`` generators of ``|0...0>``;
    the sign bits are uniform.
    """
    if not 1 <= n <= MAX_QUBITS:
        raise DomainError(f"n must be in 1..{MAX_QUBITS}")
    rng = as_seed(seed).generator()
    g = random_symplectic(n, rng)
    rows = g[1::2]  # images of Z_j
    gens = np.concatenate([rows[:, 0::2], rows[:, 1::2]], axis=1).astype(np.uint8)
    phases = rng.integers(0, 2, n).astype(np.uint8)
    return StabilizerTableau(n, gens, phases)


# --------------------------------------------------------------------------
# entropies


def stab_entropy(tab: StabilizerTableau, subset) -> int:
    """Entropy of ``subset`` in units of ``ln 2``.

    Equal to ``rank(generators restricted to subset) - |subset|``, i.e.
    ``|subset|`` minus the number of independent stabilizers supported
    inside ``subset``.
    """
    subset = sorted(set(int(q) for q in subset))
    if any(not 0 <= q < tab.n for q in subset):
        raise DomainError(f"invalid qubit indices {subset}")
    if not subset:
        return 0
    cols = subset + [tab.n + q for q in subset]
    return gf2_rank(list(tab.generators[:, cols])) - len(subset)


# --------------------------------------------------------------------------
# phase-tracked row operations


def _g(x1, z1, x2, z2) -> np.ndarray:
    """Exponent of ``i`` picked up when multiplying single-qubit Paulis."""
    return np.where(
        (x1 == 0) & (z1 == 0), 0,
        np.where((x1 == 1) & (z1 == 1), z2 - x2,
                 np.where(x1 == 1, z2 * (2 * x2 - 1), x2 * (1 - 2 * z2))))


def _rowsum(gens: np.ndarray, phases: np.ndarray, h: int, i: int, n: int) -> None:
    """Replace generator ``h`` by the product of generators ``i`` and ``h``."""
    x1, z1 = gens[i, :n].astype(int), gens[i, n:].astype(int)
    x2, z2 = gens[h, :n].astype(int), gens[h, n:].astype(int)
    total = (2 * int(phases[h]) + 2 * int(phases[i]) + int(_g(x1, z1, x2, z2).sum())) % 4
    if total % 2:
        raise ConsistencyError("rowsum of anticommuting generators")
    phases[h] = total // 2
    gens[h] ^= gens[i]


def _eliminate(gens: np.ndarray, phases: np.ndarray, cols, n: int) -> int:
    """Row-reduce on ``cols`` (in place); returns the number of pivot rows."""
    rank = 0
    for c in cols:
        piv = next((r for r in range(rank, gens.shape[0]) if gens[r, c]), None)
        if piv is None:
            continue
        if piv != rank:
            gens[[rank, piv]] = gens[[piv, rank]]
            phases[[rank, piv]] = phases[[piv, rank]]
        for r in range(gens.shape[0]):
            if r != rank and gens[r, c]:
                _rowsum(gens, phases, r, rank, n)
        rank += 1
    return rank


def subgroup_on(tab: StabilizerTableau, sites) -> tuple[np.ndarray, np.ndarray]:
    """Independent stabilizers supported on ``sites``, restricted to them.

    Returns ``(gens, phases)`` over ``len(sites)`` qubits in ``X | Z`` layout.
    """
    sites = sorted(set(int(q) for q in sites))
    n = tab.n
    rest = [q for q in range(n) if q not in sites]
    gens = tab.generators.copy()
    phases = tab.phases.copy()
    rank = _eliminate(gens, phases, rest + [n + q for q in rest], n)
    sub = gens[rank:]
    cols = sites + [n + q for q in sites]
    return sub[:, cols].copy(), phases[rank:].copy()


# --------------------------------------------------------------------------
# dense conversion


def apply_pauli(x: np.ndarray, z: np.ndarray, sign: int, vecs: np.ndarray) -> np.ndarray:
    """Apply ``(-1)^sign i^{x.z} X^x Z^z`` to the rows-indexed array ``vecs``."""
    m = len(x)
    xm, zm = _row_int(x), _row_int(z)
    idx = np.arange(2**m)
    par = np.zeros(2**m, dtype=np.int64)
    for q in range(m):
        if (zm >> q) & 1:
            par ^= (idx >> q) & 1
    coef = (1j) ** (int(np.dot(np.asarray(x, dtype=int), np.asarray(z, dtype=int))) % 4) * (-1) ** int(sign)
    out = np.empty_like(vecs)
    scaled = (coef * (1 - 2 * par)).reshape((-1,) + (1,) * (vecs.ndim - 1)) * vecs
    out[idx ^ xm] = scaled
    return out


def stab_to_dense(tab: StabilizerTableau) -> PureState:
    """Amplitude vector stabilized by every generator."""
    n = tab.n
    if n > MAX_DENSE_QUBITS:
        raise CapacityError(f"dense conversion limited to {MAX_DENSE_QUBITS} qubits")
    gens = tab.generators.copy()
    phases = tab.phases.copy()
    rank = _eliminate(gens, phases, range(n), n)
    # rows past the X pivots are Z-only: need z.k = r (mod 2) for eigenvalue +1
    zrows, zph = gens[rank:, n:], phases[rank:]
    aug = [_row_int(list(row) + [int(r)]) for row, r in zip(zrows, zph)]
    k = _solve_gf2(aug, n)
    v = np.zeros(2**n, dtype=np.complex128)
    v[k] = 1
    for row, r in zip(tab.generators, tab.phases):
        v = (v + apply_pauli(row[:n], row[n:], int(r), v)) / 2
    return PureState.from_vector(v, (2,) * n)


def _solve_gf2(aug_rows: list[int], n: int) -> int:
    """One solution ``k`` of ``row . k = rhs`` where bit ``n`` of each row holds rhs."""
    pivots: dict[int, int] = {}
    for r in aug_rows:
        for p, pr in pivots.items():
            if (r >> p) & 1:
                r ^= pr
        low = r & ((1 << n) - 1)
        if low == 0:
            if r:
                raise ConsistencyError("inconsistent Z constraints")
            continue
        p = (low & -low).bit_length() - 1
        for q in list(pivots):
            if (pivots[q] >> p) & 1:
                pivots[q] ^= r
        pivots[p] = r
    k = 0
    for p, r in pivots.items():
        if (r >> n) & 1:
            k |= 1 << p
    return k


def stab_marginal(tab: StabilizerTableau, sites, dims=None) -> DensityMatrix:
    """Dense reduced state ``2^-m prod_i (I + g_i)`` on ``sites`` (``m = len(sites)``)."""
    sites = sorted(set(int(q) for q in sites))
    m = len(sites)
    if m > MAX_DENSE_AB_QUBITS:
        raise CapacityError(f"dense marginal limited to {MAX_DENSE_AB_QUBITS} qubits")
    gens, phases = subgroup_on(tab, sites)
    rho = np.eye(2**m, dtype=np.complex128)
    for row, r in zip(gens, phases):
        rho = rho + apply_pauli(row[:m], row[m:], int(r), rho)
    rho /= 2**m
    return DensityMatrix(rho, dims if dims is not None else (2,) * m)


# --------------------------------------------------------------------------
# GHZ / EPR decomposition


@dataclass(frozen=True)
class GhzEprCounts:
    e_ab: int
    e_bc: int
    e_ac: int
    g_abc: int
    s_a: int
    s_b: int
    s_c: int

    def as_tuple(self) -> tuple[int, ...]:
        return (self.e_ab, self.e_bc, self.e_ac, self.g_abc, self.s_a, self.s_b, self.s_c)


def stab_marginal_ab(tab: StabilizerTableau, part: Tripartition) -> DensityMatrix:
    """Dense ``rho_AB`` regrouped as two sites."""
    if part.total != tab.n:
        raise DomainError(f"partition of {part.total} qubits for a {tab.n}-qubit tableau")
    return stab_marginal(tab, part.sites_a + part.sites_b, (2**part.n_a, 2**part.n_b))


def ghz_epr_decomposition(tab: StabilizerTableau, part: Tripartition) -> GhzEprCounts:
    """Counts of Bell pairs, GHZ triples and local qubits.

    Entropies come from GF(2) ranks; ``e_ab`` from the dense log-negativity
    of ``rho_AB`` (built from the stabilizers supported on AB).
    """
    if part.total != tab.n:
        raise DomainError(f"partition of {part.total} qubits for a {tab.n}-qubit tableau")
    s_a = stab_entropy(tab, part.sites_a)
    s_b = stab_entropy(tab, part.sites_b)
    s_c = stab_entropy(tab, part.sites_c)
    if part.n_a == 0 or part.n_b == 0:
        e_ab = 0
    else:
        en = log_negativity(stab_marginal_ab(tab, part), [1]) / log(2)
        e_ab = int(round(en))
        if abs(en - e_ab) > INTEGER_TOL:
            raise ConsistencyError(f"E_N/ln2 = {en!r} is not an integer")
    g = s_a + s_b - s_c - 2 * e_ab
    e_ac = s_a - e_ab - g
    e_bc = s_b - e_ab - g
    counts = GhzEprCounts(
        e_ab=e_ab, e_bc=e_bc, e_ac=e_ac, g_abc=g,
        s_a=part.n_a - e_ab - e_ac - g,
        s_b=part.n_b - e_ab - e_bc - g,
        s_c=part.n_c - e_bc - e_ac - g,
    )
    if min(counts.as_tuple()) < 0:
        raise ConsistencyError(f"negative count in decomposition {counts}")
    return counts
