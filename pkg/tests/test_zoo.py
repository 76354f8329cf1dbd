import numpy as np
import pytest

from markovgap import zoo
from markovgap.errors import CapacityError, ConstructionError
from markovgap.measures import (
    entanglement_entropy,
    is_ppt,
    log_negativity,
    marginal_ab,
    markov_gap,
    mutual_information,
)
from markovgap.qstate import PureState, Tripartition

LN2 = np.log(2)
PRODUCT = [[1]]


def _bell():
    return zoo.bell_state()


def test_named_states():
    assert np.allclose(zoo.ghz_state(3).amplitudes[[0, 7]], [2**-0.5] * 2)
    w = zoo.w_state(3).amplitudes
    assert np.allclose(w[[1, 2, 4]], [3**-0.5] * 3)
    assert np.allclose(zoo.basis_state([1, 0]).amplitudes, [0, 1, 0, 0])


def test_triangle_product_components():
    spec = zoo.TriangleSpec(np.outer([1, 0], [0, 1]), np.outer([0, 1], [1, 0]), PRODUCT)
    psi = zoo.triangle_state(spec)
    assert np.count_nonzero(np.abs(psi.amplitudes) > 1e-12) == 1


def test_triangle_bell_ab_only():
    spec = zoo.TriangleSpec.from_states(_bell(), PureState.from_vector([1.0], (1, 1)),
                                        PureState.from_vector([1.0], (1, 1)))
    psi = zoo.triangle_state(spec)
    part = zoo.triangle_partition(spec)
    assert mutual_information(psi, part) == pytest.approx(2 * LN2)
    assert markov_gap(marginal_ab(psi, part)) == pytest.approx(0, abs=1e-10)


def test_triangle_bell_bc_only():
    trivial = PureState.from_vector([1.0], (1, 1))
    spec = zoo.TriangleSpec.from_states(trivial, _bell(), trivial)
    psi = zoo.triangle_state(spec)
    part = zoo.triangle_partition(spec)
    assert part.n_a == 0
    assert mutual_information(psi, part) == pytest.approx(0, abs=1e-12)


def test_sots_single_sector_equals_triangle(seed):
    rng = seed.generator()
    spec = zoo.TriangleSpec(*(zoo.random_bipartite(2, 2, rng) for _ in range(3)))
    a = zoo.triangle_state(spec)
    b = zoo.sots_state(zoo.SotsSpec([1.0], [spec]))
    assert np.allclose(a.amplitudes, b.amplitudes)


def test_compact_sots_is_ghz():
    spec = zoo.ghz_sots_spec(layout="compact")
    assert np.allclose(zoo.sots_state(spec).amplitudes, zoo.ghz_state(3).amplitudes)


def test_ghz_sots_gap_and_analytic():
    spec = zoo.ghz_sots_spec()
    psi = zoo.sots_state(spec)
    part = spec.partition()
    assert markov_gap(marginal_ab(psi, part)) == pytest.approx(0, abs=1e-10)
    an = zoo.sots_analytic(spec)
    assert an.g == pytest.approx(LN2) and an.s_ab == 0
    assert an.mutual_ab == pytest.approx(LN2)
    assert mutual_information(psi, part) == pytest.approx(LN2)


def test_all_bell_triangle_analytic():
    b = _bell()
    spec = zoo.SotsSpec([1.0], [zoo.TriangleSpec.from_states(b, b, b)])
    an = zoo.sots_analytic(spec)
    assert (an.s_ab, an.s_bc, an.s_ac) == pytest.approx((LN2, LN2, LN2))
    assert an.g == 0 and an.entropy_a == pytest.approx(2 * LN2)
    psi = zoo.sots_state(spec)
    assert entanglement_entropy(psi, spec.partition().sites_a) == pytest.approx(2 * LN2)


def test_degenerate_weights():
    spec = zoo.SotsSpec([1.0, 0.0], [zoo.TriangleSpec(PRODUCT, PRODUCT, PRODUCT)] * 2)
    assert zoo.sots_analytic(spec).g == 0


def test_separability_examples():
    assert zoo.sots_marginal_is_separable(zoo.ghz_sots_spec())
    b = _bell()
    spec = zoo.SotsSpec([1.0], [zoo.TriangleSpec.from_states(b, b, b)])
    assert not zoo.sots_marginal_is_separable(spec)
    rho = marginal_ab(zoo.sots_state(spec), spec.partition())
    assert not is_ppt(rho, [1])[0]
    prod = zoo.SotsSpec([1.0], [zoo.TriangleSpec(np.outer([1, 0], [0, 1]), [[1]], [[1]])])
    assert prod.partition().n_c == 0
    assert zoo.sots_marginal_is_separable(prod)


def test_sots_overlap_rejected():
    comps = [zoo.TriangleSpec(PRODUCT, PRODUCT, PRODUCT)] * 2
    with pytest.raises(ConstructionError):
        zoo.SotsSpec([0.5, 0.5], comps, offsets=[(0,) * 6, (0,) * 6])
    with pytest.raises(ConstructionError):
        zoo.SotsSpec([0.3, 0.3], comps)


def test_stabilizer_model_states():
    psi = zoo.stabilizer_model_state(zoo.StabModelSpec(e_ab=1))
    part = zoo.StabModelSpec(e_ab=1).partition()
    assert entanglement_entropy(psi, part.sites_a) == pytest.approx(LN2)
    assert entanglement_entropy(psi, part.sites_b) == pytest.approx(LN2)
    assert part.n_c == 0
    spec = zoo.StabModelSpec(g_abc=1)
    ghz = zoo.stabilizer_model_state(spec)
    assert np.allclose(ghz.amplitudes, zoo.ghz_state(3).amplitudes)
    assert log_negativity(marginal_ab(ghz, spec.partition()), [1]) == pytest.approx(0, abs=1e-10)
    zero = zoo.stabilizer_model_state(zoo.StabModelSpec(s_a=1, s_b=1, s_c=1))
    assert zero.amplitudes[0] == 1
    with pytest.raises(CapacityError):
        zoo.stabilizer_model_state(zoo.StabModelSpec(e_ab=11))


def test_stabilizer_model_entropies():
    spec = zoo.StabModelSpec(1, 2, 1, 1, 0, 1, 0)
    psi = zoo.stabilizer_model_state(spec)
    part = spec.partition()
    got = [entanglement_entropy(psi, s) / LN2 for s in (part.sites_a, part.sites_b, part.sites_c)]
    assert got == pytest.approx(list(spec.entropies()))


def test_mmi_deficit_examples():
    spec = zoo.ghz_sots_spec()
    assert zoo.mmi_deficit(zoo.sots_state(spec), spec.partition()) == pytest.approx(-LN2)
    b = _bell()
    tri = zoo.SotsSpec([1.0], [zoo.TriangleSpec.from_states(b, b, b)])
    assert zoo.mmi_deficit(zoo.sots_state(tri), tri.partition()) == pytest.approx(0, abs=1e-10)
    prod = zoo.basis_state([0, 1, 0, 1])
    assert zoo.mmi_deficit(prod, Tripartition(1, 1, 2, c_split=(1, 1))) == pytest.approx(0, abs=1e-12)


def test_mmi_deficit_non_positive_on_random_sots(seed):
    for i in range(20):
        spec = zoo.random_sots_spec(seed.child(i))
        d = zoo.mmi_deficit(zoo.sots_state(spec), spec.partition())
        assert d <= 1e-10
        assert d == pytest.approx(-zoo.sots_analytic(spec).g, abs=1e-8)


def test_random_sots_within_limits(seed):
    for i in range(30):
        spec = zoo.random_sots_spec(seed.child(i), max_qubits=8)
        part = spec.partition()
        assert part.total <= 8 and min(part.n_a, part.n_b, part.n_c) >= 1
