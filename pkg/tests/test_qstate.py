import numpy as np
import pytest
from scipy.stats import ks_2samp

from markovgap.errors import CapacityError, ConstructionError, DomainError
from markovgap.measures import entanglement_entropy, von_neumann_entropy
from markovgap.qstate import (
    DensityMatrix,
    PureState,
    SeedTree,
    Tripartition,
    haar_unitary,
    partial_trace,
    partial_transpose,
    permute_sites,
    sample_haar_pure,
    sample_induced_dm,
    tensor_embed,
    tensor_product,
)
from markovgap.zoo import bell_state, ghz_state


def test_little_endian_convention():
    # site 0 is the fastest-varying index
    psi = PureState.from_vector(np.eye(8)[1], (2, 2, 2))
    rho0 = partial_trace(psi, [0]).entries
    assert np.isclose(rho0[1, 1], 1.0)
    rho2 = partial_trace(psi, [2]).entries
    assert np.isclose(rho2[0, 0], 1.0)


def test_pure_state_validation():
    with pytest.raises(DomainError):
        PureState(np.array([1.0, 1.0]), (2,))
    with pytest.raises(DomainError):
        PureState(np.array([1.0, 0.0, 0.0]), (2,))


def test_density_matrix_validation():
    with pytest.raises(DomainError):
        DensityMatrix(np.array([[1.0, 0.1], [0.0, 0.0]]), (2,))
    with pytest.raises(DomainError):
        DensityMatrix(np.eye(2), (2,))


def test_seed_tree_determinism_and_independence():
    a = sample_haar_pure([2, 2, 2], SeedTree(5, (1, 2)))
    b = sample_haar_pure([2, 2, 2], SeedTree(5, (1, 2)))
    c = sample_haar_pure([2, 2, 2], SeedTree(5, (1, 3)))
    assert np.array_equal(a.amplitudes, b.amplitudes)
    assert not np.allclose(a.amplitudes, c.amplitudes)
    with pytest.raises(DomainError):
        SeedTree(2**64)


def test_haar_unit_norm(seed):
    for i in range(20):
        psi = sample_haar_pure([2], seed.child(i))
        assert abs(np.linalg.norm(psi.amplitudes) - 1) < 1e-12


def test_haar_purity_matches_twirl(seed):
    pur = [np.sum(np.linalg.eigvalsh(partial_trace(sample_haar_pure([16, 64], seed.child(i)), [0]).entries) ** 2)
           for i in range(500)]
    expected = (16 + 64) / (16 * 64 + 1)
    assert abs(np.mean(pur) / expected - 1) < 0.02


def test_mean_projector_is_maximally_mixed(seed):
    d, n = 4, 2000
    acc = np.zeros((d, d), dtype=complex)
    for i in range(n):
        v = sample_haar_pure([d], seed.child(i)).amplitudes
        acc += np.outer(v, v.conj())
    acc /= n
    assert np.max(np.abs(acc - np.eye(d) / d)) < 5 / np.sqrt(n)


def test_unitary_invariance_of_entropy_distribution(seed):
    v = haar_unitary(16, seed.child(999))
    s1, s2 = [], []
    for i in range(500):
        psi = sample_haar_pure([4, 4], seed.child(i))
        s1.append(entanglement_entropy(psi, [0]))
        phi = sample_haar_pure([4, 4], seed.child(10**6 + i))
        s2.append(entanglement_entropy(PureState.from_vector(v @ phi.amplitudes, (4, 4)), [0]))
    assert ks_2samp(s1, s2).pvalue > 0.01


def test_induced_dm_rank_one_for_single_column(seed):
    rho = sample_induced_dm(4, 1, seed)
    lam = np.linalg.eigvalsh(rho.entries)
    assert np.isclose(lam[-1], 1.0) and np.allclose(lam[:-1], 0, atol=1e-12)


def test_induced_dm_concentrates(seed):
    hits = 0
    for i in range(200):
        lam = np.linalg.eigvalsh(sample_induced_dm(2, 2**14, seed.child(i)).entries)
        hits += np.all(np.abs(lam - 0.5) < 0.02)
    assert hits >= 190


def test_induced_matches_partial_trace_of_haar(seed):
    a = [von_neumann_entropy(sample_induced_dm(4, 8, seed.child(0, i))).nats for i in range(500)]
    b = [entanglement_entropy(sample_haar_pure([4, 8], seed.child(1, i)), [0]) for i in range(500)]
    assert ks_2samp(a, b).pvalue > 0.01


def test_induced_dm_multi_site_and_factor(seed):
    rho = sample_induced_dm((2, 4), 3, seed)
    assert rho.dims == (2, 4) and rho.factor is not None
    assert np.isclose(np.trace(rho.entries).real, 1)
    assert np.allclose(rho.factor @ rho.factor.conj().T, rho.entries)


def test_partial_trace_bell():
    rho = partial_trace(bell_state(), [0])
    assert np.allclose(rho.entries, np.eye(2) / 2)


def test_partial_trace_product_and_keep_all(seed):
    a = sample_haar_pure([2], seed.child(0))
    b = sample_haar_pure([4], seed.child(1))
    ab = tensor_product(a, b)
    assert np.allclose(partial_trace(ab, [0]).entries, np.outer(a.amplitudes, a.amplitudes.conj()), atol=1e-12)
    assert np.allclose(partial_trace(ab, [1]).entries, np.outer(b.amplitudes, b.amplitudes.conj()), atol=1e-12)
    full = partial_trace(ab, [0, 1]).entries
    assert np.allclose(full, np.outer(ab.amplitudes, ab.amplitudes.conj()))


def test_partial_trace_routes_agree(seed):
    psi = sample_haar_pure([2, 3, 4], seed)
    dm = psi.projector()
    for keep in ([0], [1], [2], [0, 2], [2, 0]):
        assert np.allclose(partial_trace(psi, keep).entries, partial_trace(dm, keep).entries, atol=1e-12)
    rho = sample_induced_dm((2, 3), 2, seed.child(1))
    dense = DensityMatrix(rho.entries, rho.dims)
    assert np.allclose(partial_trace(rho, [1]).entries, partial_trace(dense, [1]).entries, atol=1e-12)


def test_partial_transpose_bell_spectrum():
    pt = partial_transpose(bell_state().projector(), [1])
    assert np.allclose(np.linalg.eigvalsh(pt), [-0.5, 0.5, 0.5, 0.5])


def test_partial_transpose_properties(seed):
    rho = sample_induced_dm((2, 4), 3, seed)
    pt = partial_transpose(rho, [1])
    assert np.allclose(pt, pt.conj().T, atol=1e-14)
    assert abs(np.trace(pt) - 1) < 1e-14
    back = partial_transpose(DensityMatrix(pt, rho.dims), [1])
    assert np.allclose(back, rho.entries, atol=1e-14)
    mixed = DensityMatrix(np.eye(4) / 4, (2, 2))
    assert np.array_equal(partial_transpose(mixed, [0]), mixed.entries)
    prod = tensor_product(sample_haar_pure([2], seed.child(1)), sample_haar_pure([2], seed.child(2))).projector()
    assert np.linalg.eigvalsh(partial_transpose(prod, [1])).min() >= -1e-10


def test_permute_sites_roundtrip(seed):
    psi = sample_haar_pure([2, 3, 4], seed)
    p = permute_sites(psi, [2, 0, 1])
    assert p.dims == (4, 2, 3)
    back = permute_sites(p, [1, 2, 0])
    assert np.allclose(back.amplitudes, psi.amplitudes)


def test_tensor_embed_cases(seed):
    psi = sample_haar_pure([2, 2], seed)
    same = tensor_embed([psi], [[0, 0]], [2, 2])
    assert np.allclose(same.amplitudes, psi.amplitudes)
    zero = PureState.from_vector([1.0], (1, 1, 1))
    ghz = tensor_embed([zero, zero], [[0, 0, 0], [1, 1, 1]], [2, 2, 2])
    assert np.allclose(ghz.amplitudes, ghz_state(3).amplitudes)
    other = sample_haar_pure([2, 2], seed.child(1))
    first = tensor_embed([psi, other], [[0, 0], [2, 2]], [4, 4], [1.0, 0.0])
    assert np.isclose(abs(np.vdot(first.amplitudes, tensor_embed([psi], [[0, 0]], [4, 4]).amplitudes)), 1)
    with pytest.raises(ConstructionError):
        tensor_embed([psi, other], [[0, 0], [1, 1]], [4, 4])


def test_tripartition_invariants():
    part = Tripartition(2, 3, 5, c_split=(2, 3))
    assert part.total == 10 and np.isclose(sum(part.proportions), 1)
    assert part.sites_c1 == [5, 6] and part.sites_c2 == [7, 8, 9]
    with pytest.raises(DomainError):
        Tripartition(1, 1, 2, c_split=(1, 2))


def test_capacity_guard():
    with pytest.raises(CapacityError):
        sample_haar_pure([2] * 23, 0)
