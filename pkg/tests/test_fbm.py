import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import gamma

from sigmafield import fbm as F

H3, H5, H7 = F.HurstModel(0.3), F.HurstModel(0.5), F.HurstModel(0.7)


@pytest.mark.parametrize("H", [0.0, 1.0, 1.5, -0.2])
def test_invalid_hurst(H):
    with pytest.raises(ValueError):
        F.HurstModel(H)


def test_closed_form_examples():
    assert F.fbm_covariance(H5, 1, 2) == 1.0
    for m in (H3, H5, H7):
        assert F.fbm_covariance(m, 1, 1) == 1.0
    assert F.fbm_covariance(H7, 1, 2) == pytest.approx(2**0.4, rel=1e-15)
    # s = |t - s| makes the H-dependence cancel
    assert F.fbm_covariance(H3, 0.5, 1.0) == pytest.approx(0.5, rel=1e-15)
    with pytest.raises(ValueError):
        F.fbm_covariance(H7, -1, 1)


def test_spectral_examples():
    assert F.spectral_covariance(H7, 0.0, 1.0) == 0.0
    assert F.spectral_covariance(H5, 1.0, 1.0) == pytest.approx(1.0, abs=1e-3)
    assert H5.spectral_density(3.0) == pytest.approx(1 / (2 * math.pi))
    assert F.spectral_covariance(H3, 0.5, 1.0) == pytest.approx(F.fbm_covariance(H3, 0.5, 1.0), rel=1e-3)


def test_factor_kernel_examples():
    fk = F.FactorKernel(H5)
    x = np.linspace(-2, 3, 101)
    assert np.array_equal(fk.values(1.5, x), ((x >= 0) & (x <= 1.5)).astype(float))
    fk7 = F.FactorKernel(H7)
    assert F.factor_kernel_eval(fk7, 1.0, 1.5) == 0.0
    bare = F.FactorKernel(H7, normalized=False)
    expected = (2**0.2 - 1) / gamma(1.2)
    assert F.factor_kernel_eval(bare, 1.0, -1.0) == pytest.approx(expected, rel=1e-14)
    corr = math.sqrt(gamma(2.4) * math.sin(0.7 * math.pi))
    assert F.factor_kernel_eval(fk7, 1.0, -1.0) == pytest.approx(expected * corr, rel=1e-14)
    assert F.factor_kernel_eval(F.FactorKernel(H3), 1.0, 1.0) == F.SINGULAR


def test_factorization_gram_examples():
    G = F.factorization_gram(F.FactorKernel(H5), [1, 2]).entries
    assert np.allclose(G, [[1, 1], [1, 2]], atol=1e-6)
    G3 = F.factorization_gram(F.FactorKernel(H3), [0.5, 1]).entries
    assert G3[0, 1] == pytest.approx(F.fbm_covariance(H3, 0.5, 1), rel=1e-3)
    for m in (H3, H7):
        d = F.factorization_gram(F.FactorKernel(m), [1.7]).entries[0, 0]
        assert d == pytest.approx(1.7 ** (2 * m.H), rel=1e-6)


def test_unnormalized_variance_defect():
    # bare prefactor gives Var X_1 = 1 / (Gamma(2H + 1) sin(pi H))
    for m in (H3, H7):
        d = F.factorization_gram(F.FactorKernel(m, normalized=False), [1.0]).entries[0, 0]
        assert d == pytest.approx(1 / (gamma(2 * m.H + 1) * math.sin(math.pi * m.H)), rel=1e-6)


def test_parts_add_up():
    fk = F.FactorKernel(H7)
    gm = F.factorization_gram(fk, [1, 2], "minus").entries
    gp = F.factorization_gram(fk, [1, 2], "plus").entries
    assert np.allclose(gm + gp, F.fbm_covariance(H7, np.array([[1, 1], [2, 2]]), np.array([[1, 2], [1, 2]])),
                       rtol=1e-8)


def test_tail_estimate_decreases():
    assert F.tail_estimate(H7, 1, 2, 1e4) < F.tail_estimate(H7, 1, 2, 1e2)


def test_simulate_brownian_case():
    n = 40_000
    for method in ("cholesky", "ito-grid"):
        e = F.simulate_fbm(H5, [0.5, 1.0], n, method, seed=4)
        c, se = e.cov(0, 1)
        assert abs(c - 0.5) <= 5 * se + e.meta.get("bias_bound", 0.0)


def test_simulate_rejects_unsorted():
    with pytest.raises(ValueError):
        F.simulate_fbm(H7, [1.0, 0.5], 10)


def test_grid_bias_bound_is_small():
    e = F.simulate_fbm(H7, [1.0, 2.0], 100, "ito-grid", seed=0)
    assert e.meta["bias_bound"] < 1e-3
    assert np.max(np.abs(e.meta["grid_covariance"] - e.meta["covariance"])) <= e.meta["bias_bound"] + 1e-15


def test_filtration_split_brownian_minus_vanishes():
    r = F.filtration_split(F.FactorKernel(H5), [1.0, 2.0], 100, seed=1)
    assert np.all(r["ensemble_minus"].values == 0)


def test_split_sums_to_grid_sample():
    fk = F.FactorKernel(H7)
    r = F.filtration_split(fk, [1.0, 2.0], 200, seed=2)
    e = F.simulate_fbm(H7, [1.0, 2.0], 200, "ito-grid", seed=2, fk=fk)
    assert np.allclose(r["ensemble_minus"].values + r["ensemble_plus"].values, e.values, atol=1e-12)


def test_semimartingale_examples():
    assert F.semimartingale_check(F.FactorKernel(H5), 1.0, 2.0, 128)["residual"] <= 1e-12
    assert F.semimartingale_check(F.FactorKernel(H7), 1.0, 1.0, 128)["residual"] <= 1e-12
    assert F.semimartingale_check(F.FactorKernel(H7), 1.0, 2.0, 128)["residual"] > 0.01


def test_paley_wiener_examples():
    box = lambda lam: 1.0  # noqa: E731
    assert F.paley_wiener_norm(H5, box, support=(-1, 1)) == pytest.approx(1 / math.pi, rel=1e-12)
    assert F.paley_wiener_norm(H7, box, support=(-1, 1)) == pytest.approx(H7.spectral_const * 2 / 0.6, rel=1e-10)


@given(st.floats(-5, 5))
def test_paley_wiener_translation_invariant(t):
    g = lambda lam: np.exp(-lam * lam)  # noqa: E731
    assert F.paley_wiener_norm(H3, F.translate(g, t)) == pytest.approx(F.paley_wiener_norm(H3, g), rel=1e-8)


@given(st.floats(0.05, 0.95), st.floats(0, 3), st.floats(0, 3), st.floats(0.1, 4))
def test_self_similarity(H, s, t, c):
    m = F.HurstModel(H)
    assert F.fbm_covariance(m, c * s, c * t) == pytest.approx(c ** (2 * H) * F.fbm_covariance(m, s, t),
                                                              rel=1e-9, abs=1e-12)


@given(st.floats(0.05, 0.95), st.lists(st.floats(0.01, 3), min_size=2, max_size=8, unique=True))
def test_closed_form_is_psd(H, ts):
    t = np.array(ts)
    K = F.fbm_covariance(F.HurstModel(H), t[:, None], t[None, :])
    assert np.linalg.eigvalsh(K)[0] >= -1e-10 * np.max(np.abs(K))
