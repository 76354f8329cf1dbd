import itertools
from math import e, log, pi

import numpy as np
import pytest

from markovgap import analytic as an
from markovgap.errors import DomainError

LN2 = log(2)


def test_page_entropy_examples():
    assert an.page_entropy(2, 2) == pytest.approx(LN2 - 0.5)
    assert an.page_entropy(2, 4) == pytest.approx(LN2 - 0.25)
    assert an.page_entropy(16, 64) == pytest.approx(log(16) - 16 / 128)
    # the formula gives -1/(2D) for a trivial factor; clamped
    assert an.page_entropy(1, 8) == 0.0


def test_avg_purity():
    assert an.avg_purity(16, 64) == pytest.approx(80 / 1025)


def test_avg_cmi_branches():
    v = an.avg_cmi((3, 3, 4))
    assert v.value == pytest.approx(2 * LN2) and v.regime == an.ES and v.order == "leading"
    v = an.avg_cmi((2, 2, 6))
    assert v.value == pytest.approx(1 / 8) and v.regime == an.PPT
    v = an.avg_cmi((6, 2, 2))
    assert v.value == pytest.approx(4 * LN2) and v.regime == an.ME


def test_avg_reflected_entropy_regimes():
    # small-AB regime: p0 = 1 - 4/(4*1024)
    p0 = 1 - 4 / (4 * 1024)
    assert an.reflected_p0(2, 2, 1024) == pytest.approx(p0)
    expected = -p0 * log(p0) - (1 - p0) * log(1 - p0) + (1 - p0) * (log(4) - 4 / 8)
    assert an.avg_reflected_entropy(2, 2, 1024) == pytest.approx(expected, rel=1e-12)
    assert an.avg_reflected_entropy(2, 2, 1024) == pytest.approx(0.0086106227797324, abs=1e-12)
    # large-AB regime: p0 = D_C/D_AB
    assert an.reflected_p0(16, 16, 2) == pytest.approx(2 / 256)
    assert an.avg_reflected_entropy(16, 16, 2) == pytest.approx(5.0514503847685, abs=1e-10)
    # p0 -> 1 collapses to zero
    assert an.avg_reflected_entropy(2, 2, 2**40) < 1e-9
    assert an.avg_reflected_entropy(4, 2, 8) == an.avg_reflected_entropy(2, 4, 8)


def test_avg_markov_gap_branches():
    v = an.avg_markov_gap((3, 3, 4))
    assert v.value == pytest.approx(4 * LN2) and v.regime == an.ES
    # PPT branch D_AB/(4 D_C) (N - 2 N_B) ln 2
    v = an.avg_markov_gap((2, 2, 8))
    assert v.value == pytest.approx(16 / (4 * 256) * 8 * LN2) and v.regime == an.PPT
    assert v.value == pytest.approx(0.0866433975699932, abs=1e-12)
    v = an.avg_markov_gap((2, 8, 2))
    assert v.value == pytest.approx(0.03125) and v.regime == an.ME
    v = an.avg_markov_gap((5, 5, 4))
    assert v.value == pytest.approx((14 - 10) * LN2)


def test_avg_markov_gap_empty_party_is_zero():
    assert an.avg_markov_gap((0, 4, 6)).value == 0.0
    assert an.avg_markov_gap((4, 0, 6)).order == "exact"


def test_markov_gap_and_cmi_non_negative_and_symmetric():
    for n_a, n_b, n_c in itertools.product(range(0, 11), repeat=3):
        if n_a + n_b + n_c == 0 or n_a + n_b + n_c > 30:
            continue
        h = an.avg_markov_gap((n_a, n_b, n_c))
        assert h.value >= 0
        assert an.avg_cmi((n_a, n_b, n_c)).value >= 0
        assert h.value == an.avg_markov_gap((n_b, n_a, n_c)).value


def test_boundary_points_use_es_branch():
    v = an.avg_markov_gap((2, 2, 4))
    assert v.regime == an.ES and v.boundary
    lab = an.classify_counts((2, 2, 4))
    assert lab.label == an.ES and lab.boundary


def test_thresholds_examples():
    t = an.thresholds(8, 8, 0.3, 0.3)
    assert t.s_ppt == 256
    assert an.thresholds(2, 2, 0.2, 0.2).n_sep == pytest.approx(0.6)
    t = an.thresholds(1, 4, 0.0, 0.4)
    assert t.n_sep == pytest.approx(0.5) and t.n_ppt == 0.5
    t = an.thresholds(4, 4, 0.25, 0.25, c=1.0, big_c=2.0)
    assert t.s_sep_low == pytest.approx(64) and t.s_sep_high == pytest.approx(2 * 64 * log(16) ** 2)
    with pytest.raises(DomainError):
        an.ThresholdSet(4, 1.0, 2.0, 0.5, 0.4)


def test_classify_phase_examples():
    assert an.classify_phase(0.2, 0.2, 0.6).label == an.PPT
    assert an.classify_phase(0.3, 0.3, 0.4).label == an.ES
    assert an.classify_phase(0.6, 0.2, 0.2).label == an.ME
    with pytest.raises(DomainError):
        an.classify_phase(0.5, 0.5, 0.5)


def test_classify_agrees_with_thresholds():
    grid = np.linspace(0, 1, 41)
    for n_a in grid:
        for n_b in grid:
            n_c = 1 - n_a - n_b
            if n_c < -1e-12:
                continue
            n_c = max(n_c, 0.0)
            lab = an.classify_phase(n_a, n_b, n_c, tol=1e-9)
            t = an.thresholds(2, 2, n_a, n_b)
            assert (lab.label == an.PPT) == (n_c > t.n_ppt + 1e-9)
            if lab.label == an.PPT:
                assert lab.separable == (n_c > t.n_sep + 1e-9)
    # bound-entanglement window: PPT but not yet separable
    lab = an.classify_phase(0.2, 0.25, 0.55)
    assert lab.label == an.PPT and not lab.separable


def test_mp_density_examples():
    assert an.mp_edges(1, 1) == (0.0, 4.0)
    assert an.mp_density(2.0, 1, 1) == pytest.approx(1 / (2 * pi))
    assert an.mp_density(5.0, 1, 1) == 0.0
    assert an.mp_density(0.01, 4, 1) == 0.0


@pytest.mark.parametrize("c", [0.25, 1.0, 4.0])
@pytest.mark.parametrize("tau", [1 / 16, 1 / 64])
def test_mp_normalisation(c, tau):
    lo, hi = an.mp_edges(c, tau)
    assert an.mp_cdf(hi * 1.01, c, tau) == pytest.approx(1.0, abs=1e-6)
    # independent quadrature of the density on the support
    from scipy.integrate import quad

    mass, _ = quad(lambda x: an.mp_density(x, c, tau), lo, hi, limit=200)
    assert mass + an.mp_atom(c) == pytest.approx(1.0, abs=1e-6)


def test_mp_ks_examples(seed):
    u = (np.arange(4096) + 0.5) / 4096
    sample = an.mp_quantile(u, 1.0, 1.0)
    assert an.mp_ks_distance(sample, 1.0, 1.0) < 0.05
    rng = seed.generator()
    random_sample = an.mp_quantile(rng.random(4096), 0.5, 2.0)
    assert an.mp_ks_distance(random_sample, 0.5, 2.0) < 0.05
    assert an.mp_ks_distance(np.full(64, 1.0), 1.0, 1.0) > 0.3
    assert 0 <= an.mp_ks_distance([0.3, 0.7], 2.0, 0.25) <= 1


def test_mp_ks_on_induced_spectra(seed):
    from markovgap.measures import spectrum
    from markovgap.qstate import sample_induced_dm

    good = 0
    for i in range(100):
        lam = spectrum(sample_induced_dm(64, 1024, seed.child(i)))
        good += an.mp_ks_distance(lam, 1024 / 64, 1 / 1024) < 0.08
    assert good >= 90


def test_levy_bound():
    assert an.levy_bound(1.0, 1.0, 1) == pytest.approx(2 * e**-2)
    assert an.levy_bound(1.0, 1.0, 10**6) < 1e-300 + 1e-12
    assert an.levy_bound(1e-9, 1.0, 4) == 1.0
    assert an.levy_bound(0.5, 1, 8) > an.levy_bound(0.6, 1, 8)
    assert an.levy_bound(0.5, 1, 8) > an.levy_bound(0.5, 1, 9)
    assert an.levy_bound(0.5, 1, 8) < an.levy_bound(0.5, 1.1, 8)


def test_lipschitz_constants():
    assert an.lipschitz_constants(2, 64)["entropy"] == pytest.approx(2 * LN2)
    assert an.lipschitz_constants(8, 8)["mutual_info"] == pytest.approx(2 * log(8))
    assert an.lipschitz_constants(4, 1024)["markov_gap"] == pytest.approx(2 * (2 * log(4) + log(1024)))


def test_mean_median_gap_bound():
    assert an.mean_median_gap_bound(1.0, 2 * pi) == pytest.approx(1.0)
    assert an.mean_median_gap_bound(3.0, 2 * pi) == pytest.approx(3.0)
    assert an.mean_median_gap_bound(1.0, 1e30) < 1e-14
