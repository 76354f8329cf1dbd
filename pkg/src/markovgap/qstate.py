"""Dense states, seeded Haar sampling and the tensor kernels.

Index convention
----------------
Every register is an ordered list of sites with local dimensions ``dims``.
Site 0 is the *fastest-varying* digit of the flat amplitude index
(little-endian)::

    index = i_0 + d_0 * (i_1 + d_1 * (i_2 + ...))

For qubit registers this means qubit ``k`` is bit ``k`` of the index. All
modules rely on this; ``tensor_product(a, b)`` therefore places ``a`` on the
low sites and equals ``np.kron(b, a)`` at the amplitude level.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod
from typing import Sequence

import numpy as np

from .errors import CapacityError, ConstructionError, DomainError

MAX_PURE_DIM = 2**22
MAX_INDUCED_DIM = 2**26

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10


# --------------------------------------------------------------------------
# seeding


@dataclass(frozen=True)
class SeedTree:
    """Splittable, counter-based random stream keyed by ``(master_seed, path)``.

    Two trees with different paths give statistically independent streams;
    the same tree always gives the same stream. There is no global state.
    """

    master_seed: int
    path: tuple[int, ...] = ()

    def __post_init__(self):
        if not 0 <= int(self.master_seed) < 2**64:
            raise DomainError(f"master_seed must fit in 64 bits, got {self.master_seed}")
        object.__setattr__(self, "master_seed", int(self.master_seed))
        path = tuple(int(p) for p in self.path)
        if any(p < 0 for p in path):
            raise DomainError(f"seed path entries must be non-negative, got {path}")
        object.__setattr__(self, "path", path)

    def child(self, *indices: int) -> "SeedTree":
        return SeedTree(self.master_seed, self.path + tuple(indices))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.master_seed, spawn_key=self.path)
        return np.random.Generator(np.random.Philox(ss))


def as_seed(seed: SeedTree | int) -> SeedTree:
    if isinstance(seed, SeedTree):
        return seed
    return SeedTree(int(seed))


# --------------------------------------------------------------------------
# tensor reshaping helpers


def _rev(n: int) -> list[int]:
    return list(range(n - 1, -1, -1))


def _site_tensor(flat: np.ndarray, dims: Sequence[int], trailing: tuple[int, ...] = ()) -> np.ndarray:
    """View a flat little-endian array as a tensor whose axis ``k`` is site ``k``."""
    n = len(dims)
    t = flat.reshape(tuple(dims[::-1]) + trailing)
    return t.transpose(_rev(n) + list(range(n, n + len(trailing))))


def _flatten_sites(t: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(t.transpose(_rev(t.ndim))).reshape(-1)


def _matricize(t: np.ndarray, rows: Sequence[int]) -> np.ndarray:
    """Matrix whose row index runs little-endian over the axes ``rows``."""
    rows = list(rows)
    rest = [k for k in range(t.ndim) if k not in rows]
    n_rows = prod(t.shape[k] for k in rows)
    return t.transpose(rows[::-1] + rest[::-1]).reshape(n_rows, -1)


def _dm_perm(n: int) -> list[int]:
    return _rev(n) + [n + i for i in _rev(n)]


def _dm_tensor(entries: np.ndarray, dims: Sequence[int]) -> np.ndarray:
    # axes: row sites 0..n-1, then column sites 0..n-1
    n = len(dims)
    return entries.reshape(tuple(dims[::-1]) * 2).transpose(_dm_perm(n))


def _dm_matrix(t: np.ndarray) -> np.ndarray:
    n = t.ndim // 2
    d = prod(t.shape[:n])
    return np.ascontiguousarray(t.transpose(_dm_perm(n))).reshape(d, d)


def _check_dims(dims: Sequence[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 1 for d in dims):
        raise DomainError(f"dimensions must be a non-empty list of positive integers, got {dims}")
    return dims


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.complex128, copy=True)
    a.setflags(write=False)
    return a


# --------------------------------------------------------------------------
# state types


@dataclass(frozen=True, eq=False)
class PureState:
    """Unit vector over an ordered multi-site register."""

    amplitudes: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        dims = _check_dims(self.dims)
        amps = _frozen(np.ravel(self.amplitudes))
        if amps.size != prod(dims):
            raise DomainError(f"{amps.size} amplitudes do not match dims {dims}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise DomainError(f"state is not normalised: |psi| = {norm!r}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_vector(cls, vec, dims: Sequence[int]) -> "PureState":
        """Normalise ``vec`` and wrap it."""
        vec = np.asarray(vec, dtype=np.complex128).ravel()
        norm = np.linalg.norm(vec)
        if norm == 0:
            raise DomainError("cannot normalise the zero vector")
        return cls(vec / norm, dims)

    @classmethod
    def from_tensor(cls, t: np.ndarray) -> "PureState":
        return cls.from_vector(_flatten_sites(np.asarray(t)), t.shape)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def n_sites(self) -> int:
        return len(self.dims)

    def tensor(self) -> np.ndarray:
        return _site_tensor(self.amplitudes, self.dims)

    def regroup(self, dims: Sequence[int]) -> "PureState":
        """Same amplitudes, coarser or finer site boundaries."""
        return PureState(self.amplitudes, dims)

    def projector(self) -> "DensityMatrix":
        v = self.amplitudes
        return DensityMatrix(np.outer(v, v.conj()), self.dims, factor=v[:, None])


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace matrix over an ordered register.

    ``factor`` optionally holds a thin matrix ``F`` with ``entries = F F^dagger``.
    Samplers and partial traces of pure states set it; spectral kernels
    use it to avoid dense eigensolves on low-rank marginals. Positivity is
    checked by the consumers that eigendecompose anyway.
    """

    entries: np.ndarray
    dims: tuple[int, ...]
    factor: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        dims = _check_dims(self.dims)
        rho = _frozen(self.entries)
        d = prod(dims)
        if rho.shape != (d, d):
            raise DomainError(f"matrix of shape {rho.shape} does not match dims {dims}")
        herm = np.max(np.abs(rho - rho.conj().T)) if d else 0.0
        if herm > HERMITIAN_TOL:
            raise DomainError(f"matrix is not Hermitian (max deviation {herm:.3g})")
        tr = np.trace(rho).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise DomainError(f"trace is {tr!r}, expected 1")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "entries", rho)
        if self.factor is not None:
            f = _frozen(self.factor)
            if f.ndim != 2 or f.shape[0] != d:
                raise DomainError("factor must have one row per basis state")
            object.__setattr__(self, "factor", f)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def n_sites(self) -> int:
        return len(self.dims)

    def tensor(self) -> np.ndarray:
        return _dm_tensor(self.entries, self.dims)

    def regroup(self, dims: Sequence[int]) -> "DensityMatrix":
        return DensityMatrix(self.entries, dims, factor=self.factor)

    def swapped(self) -> "DensityMatrix":
        """Exchange the two sites of a bipartite matrix (A <-> B)."""
        if self.n_sites != 2:
            raise DomainError("swapped() needs exactly two sites")
        t = self.tensor().transpose(1, 0, 3, 2)
        factor = None
        if self.factor is not None:
            ft = _site_tensor(self.factor, self.dims, (self.factor.shape[1],))
            factor = _matricize(ft.transpose(1, 0, 2), [0, 1])
        return DensityMatrix(_dm_matrix(t), self.dims[::-1], factor=factor)


@dataclass(frozen=True)
class Tripartition:
    """Qubit counts of consecutive A | B | C blocks, optional C = C1 C2 split."""

    n_a: int
    n_b: int
    n_c: int
    c_split: tuple[int, int] | None = None

    def __post_init__(self):
        if min(self.n_a, self.n_b, self.n_c) < 0:
            raise DomainError(f"qubit counts must be non-negative: {self}")
        if self.c_split is not None:
            split = tuple(int(x) for x in self.c_split)
            if len(split) != 2 or min(split) < 0 or sum(split) != self.n_c:
                raise DomainError(f"c_split {self.c_split} does not add up to n_c={self.n_c}")
            object.__setattr__(self, "c_split", split)

    @property
    def total(self) -> int:
        return self.n_a + self.n_b + self.n_c

    @property
    def proportions(self) -> tuple[float, float, float]:
        n = self.total
        return self.n_a / n, self.n_b / n, self.n_c / n

    @property
    def sites_a(self) -> list[int]:
        return list(range(self.n_a))

    @property
    def sites_b(self) -> list[int]:
        return list(range(self.n_a, self.n_a + self.n_b))

    @property
    def sites_c(self) -> list[int]:
        return list(range(self.n_a + self.n_b, self.total))

    @property
    def sites_c1(self) -> list[int]:
        if self.c_split is None:
            raise DomainError("tripartition has no C1/C2 split")
        return self.sites_c[: self.c_split[0]]

    @property
    def sites_c2(self) -> list[int]:
        if self.c_split is None:
            raise DomainError("tripartition has no C1/C2 split")
        return self.sites_c[self.c_split[0]:]

    def check(self, state: PureState) -> None:
        if state.dims != (2,) * self.total:
            raise DomainError(f"state dims {state.dims} do not form a {self.total}-qubit register")


# --------------------------------------------------------------------------
# sampling


def sample_haar_pure(dims: Sequence[int], seed: SeedTree | int) -> PureState:
    """Haar-random pure state: a normalised vector of i.i.d. complex Gaussians."""
    dims = _check_dims(dims)
    d = prod(dims)
    if d > MAX_PURE_DIM:
        raise CapacityError(f"register dimension {d} exceeds {MAX_PURE_DIM}")
    rng = as_seed(seed).generator()
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return PureState(z / np.linalg.norm(z), dims)


def sample_induced_dm(d_sys: int | Sequence[int], d_env: int, seed: SeedTree | int) -> DensityMatrix:
    """Sample ``X X^dagger / Tr(X X^dagger)`` for a ``d_sys x d_env`` Ginibre ``X``.

    This has the law of the ``d_sys`` marginal of a Haar state on
    ``d_sys * d_env``, without ever building that state. ``d_sys`` may be a
    list of site dimensions, which are recorded on the result.
    """
    sys_dims = (int(d_sys),) if np.isscalar(d_sys) else tuple(int(d) for d in d_sys)
    if min(sys_dims) < 1 or int(d_env) < 1:
        raise DomainError(f"dimensions must be positive: d_sys={d_sys}, d_env={d_env}")
    ds, de = prod(sys_dims), int(d_env)
    if ds * de > MAX_INDUCED_DIM:
        raise CapacityError(f"d_sys*d_env = {ds * de} exceeds {MAX_INDUCED_DIM}")
    rng = as_seed(seed).generator()
    x = rng.standard_normal((ds, de)) + 1j * rng.standard_normal((ds, de))
    x /= np.sqrt(np.vdot(x, x).real)
    rho = x @ x.conj().T
    rho = (rho + rho.conj().T) / 2
    return DensityMatrix(rho, sys_dims, factor=x if de < ds else None)


def haar_unitary(d: int, seed: SeedTree | int) -> np.ndarray:
    """Haar unitary from the phase-corrected QR of a Ginibre matrix."""
    rng = as_seed(seed).generator()
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(z)
    ph = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * ph


# --------------------------------------------------------------------------
# kernels


def _check_sites(idx, n: int, *, allow_empty: bool) -> list[int]:
    idx = sorted(int(i) for i in idx)
    if len(set(idx)) != len(idx) or any(not 0 <= i < n for i in idx):
        raise DomainError(f"invalid site indices {idx} for a {n}-site register")
    if not idx and not allow_empty:
        raise DomainError("empty index set")
    return idx


def partial_trace(state: PureState | DensityMatrix, keep) -> DensityMatrix:
    """Reduced density matrix on the sites ``keep`` (returned in original order).

    Examples
    --------
    >>> bell = PureState(np.array([1, 0, 0, 1]) / np.sqrt(2), (2, 2))
    >>> np.allclose(partial_trace(bell, [0]).entries, np.eye(2) / 2)
    True
    """
    keep = _check_sites(keep, state.n_sites, allow_empty=False)
    kept_dims = tuple(state.dims[k] for k in keep)

    if isinstance(state, PureState):
        m = _matricize(state.tensor(), keep)
    elif state.factor is not None:
        r = state.factor.shape[1]
        m = _matricize(_site_tensor(state.factor, state.dims, (r,)), keep)
    else:
        n = state.n_sites
        t = state.tensor()
        letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
        if 2 * n > len(letters):
            raise CapacityError(f"{n}-site density matrices are not supported")
        rows = letters[:n]
        cols = "".join(letters[n + k] if k in keep else letters[k] for k in range(n))
        out = "".join(rows[k] for k in keep) + "".join(cols[k] for k in keep)
        red = np.einsum(f"{rows}{cols}->{out}", t)
        rho = _dm_matrix(red)
        return DensityMatrix((rho + rho.conj().T) / 2, kept_dims)

    rho = m @ m.conj().T
    rho = (rho + rho.conj().T) / 2
    return DensityMatrix(rho, kept_dims, factor=m if m.shape[1] < m.shape[0] else None)


def partial_transpose(dm: DensityMatrix, on) -> np.ndarray:
    """Transpose the sites ``on`` of ``dm``; returns a plain Hermitian array."""
    on = _check_sites(on, dm.n_sites, allow_empty=True)
    n = dm.n_sites
    t = dm.tensor()
    perm = list(range(2 * n))
    for k in on:
        perm[k], perm[n + k] = n + k, k
    return _dm_matrix(t.transpose(perm))


def tensor_product(*states: PureState) -> PureState:
    """Product state; the first argument occupies the lowest sites."""
    if not states:
        raise DomainError("need at least one factor")
    amps = states[0].amplitudes
    for s in states[1:]:
        amps = np.kron(s.amplitudes, amps)
    dims = sum((s.dims for s in states), ())
    return PureState.from_vector(amps, dims)


def permute_sites(state: PureState, order: Sequence[int]) -> PureState:
    """Reorder sites: new site ``k`` is old site ``order[k]``."""
    order = [int(o) for o in order]
    if sorted(order) != list(range(state.n_sites)):
        raise DomainError(f"{order} is not a permutation of {state.n_sites} sites")
    t = state.tensor().transpose(order)
    return PureState(_flatten_sites(t), t.shape)


def tensor_embed(blocks: Sequence[PureState], offsets: Sequence[Sequence[int]],
                 dims: Sequence[int], weights: Sequence[float] | None = None) -> PureState:
    """Weighted direct-sum embedding of block states into a larger register.

    Block ``l`` is placed at index ranges ``[offsets[l][k], offsets[l][k] +
    blocks[l].dims[k])`` of every site ``k`` and the result is
    ``sum_l sqrt(w_l) |block_l>``. Every pair of blocks must occupy disjoint
    ranges on at least one site, which makes the embedded blocks orthogonal.

    Parameters
    ----------
    blocks : list of PureState
        Sector states, all with ``len(dims)`` sites.
    offsets : list of int lists
        Placement of each block, one offset per site.
    dims : list of int
        Local dimensions of the target register.
    weights : list of float, optional
        Sector probabilities; equal weights if omitted.
    """
    dims = _check_dims(dims)
    if len(blocks) == 0 or len(offsets) != len(blocks):
        raise ConstructionError("need one offset list per block")
    if weights is None:
        weights = np.full(len(blocks), 1.0 / len(blocks))
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (len(blocks),) or np.any(weights < 0) or abs(weights.sum() - 1) > 1e-9:
        raise ConstructionError(f"weights must be a probability vector, got {weights}")

    spans = []
    for blk, off in zip(blocks, offsets):
        if blk.n_sites != len(dims) or len(off) != len(dims):
            raise ConstructionError("block/offset site count does not match the target register")
        span = [(int(o), int(o) + d) for o, d in zip(off, blk.dims)]
        if any(lo < 0 or hi > d for (lo, hi), d in zip(span, dims)):
            raise ConstructionError(f"block placement {span} does not fit into dims {dims}")
        spans.append(span)
    for i in range(len(spans)):
        for j in range(i + 1, len(spans)):
            if all(a_lo < b_hi and b_lo < a_hi for (a_lo, a_hi), (b_lo, b_hi) in zip(spans[i], spans[j])):
                raise ConstructionError(f"sectors {i} and {j} overlap on every site")

    out = np.zeros(dims, dtype=np.complex128)
    for blk, span, w in zip(blocks, spans, weights):
        out[tuple(slice(lo, hi) for lo, hi in span)] += np.sqrt(w) * blk.tensor()
    return PureState.from_tensor(out)
