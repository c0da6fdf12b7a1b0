import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sigmafield import field as FD
from sigmafield.graph import WeightedGraph
from sigmafield.measures import LebesgueMeasure, Partition, Region, measure_from_config

L = LebesgueMeasure()
SPEC = FD.FieldSpec(L, seed=11)


def iv(a, b):
    return Region.interval(a, b)


def test_unit_variance_column():
    n = 50_000
    ens = FD.sample_field(SPEC, [iv(0, 1)], n)
    assert abs(ens.var()[0] - 1.0) <= 4 * math.sqrt(2 / n)


def test_disjoint_regions_uncorrelated():
    ens = FD.sample_field(SPEC, [iv(0, 0.5), iv(0.5, 1)], 50_000)
    c, se = ens.cov(0, 1)
    assert abs(c) <= 4 * se


def test_sampling_is_reproducible_and_seed_sensitive():
    regs = [iv(0, 0.3), iv(0.2, 0.9)]
    a = FD.sample_field(SPEC, regs, 500).values
    b = FD.sample_field(SPEC, regs, 500).values
    c = FD.sample_field(FD.FieldSpec(L, seed=12), regs, 500).values
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_prefix_stability_of_paths():
    regs = [iv(0, 0.3), iv(0.2, 0.9)]
    short = FD.sample_field(SPEC, regs, 100).values
    long = FD.sample_field(SPEC, regs, 1000).values
    assert np.array_equal(short, long[:100])


def test_ito_integral_cases():
    A = iv(0, 0.4)
    ens = FD.sample_field(SPEC, [A], 100)
    assert np.array_equal(FD.ito_integral(SPEC, FD.SimpleFunction.indicator(A), ens), ens.values[:, 0])
    zero = FD.SimpleFunction((0.0,), (A,))
    assert np.all(FD.ito_integral(SPEC, zero, ens) == 0)


def test_ito_isometry_halves():
    regs = (iv(0, 0.5), iv(0.5, 1))
    phi = FD.SimpleFunction((1.0, 1.0), regs)
    n = 50_000
    x = FD.ito_integral(SPEC, phi, FD.sample_field(SPEC, list(regs), n))
    se = (x * x).std(ddof=1) / math.sqrt(n)
    assert abs((x * x).mean() - phi.norm_sq(L)) <= 4 * se


def test_simple_function_rejects_overlap():
    with pytest.raises(ValueError, match="overlap"):
        FD.SimpleFunction((1, 1), (iv(0, 0.6), iv(0.5, 1)))


def test_factor_covariance_eigen_clip_and_error():
    G = np.array([[1.0, 1.0], [1.0, 1.0]])
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        Lf = FD.factor_covariance(G)
    assert np.allclose(Lf @ Lf.T, G)
    assert any(issubclass(w.category, FD.FactorizationWarning) for w in rec)
    with pytest.raises(FD.FactorizationError):
        FD.factor_covariance(np.array([[1.0, 2.0], [2.0, 1.0]]))


def test_kl_parseval_examples():
    b = FD.OrthonormalBasis("haar", 256)
    assert FD.kl_truncated_covariance(b, iv(0, 1), iv(0, 1)) == pytest.approx(1.0, abs=1e-12)
    assert FD.kl_truncated_covariance(b, iv(0, 0.5), iv(0.5, 1)) == pytest.approx(0.0, abs=1e-12)
    assert FD.kl_truncated_covariance(b, iv(0, 0.5), iv(0.25, 0.75)) == pytest.approx(0.25, abs=1e-2)


@pytest.mark.parametrize("kind", ["haar", "fourier-cosine"])
def test_basis_orthonormal(kind):
    assert np.allclose(FD.OrthonormalBasis(kind, 32).gram(), np.eye(32), atol=1e-8)


def test_qv_single_cell_constants():
    c = FD.qv_cell_statistics(SPEC, iv(0, 1), 100_000)
    assert c["mse_target"] == 2.0 and c["fourth_target"] == 3.0
    assert 0.8 <= c["mse"] / 2.0 <= 1.2
    assert 0.9 <= c["fourth"] / 3.0 <= 1.1


def test_cross_variation_limits():
    assert FD.cross_variation_limit(L, L, L, iv(0, 1)) == pytest.approx(1.0, abs=1e-12)
    mu = measure_from_config({"kind": "density", "density": {"table": [[0, 0], [1, 2]]}})
    nu = measure_from_config({"kind": "density", "density": {"table": [[0, 2], [1, 0]]}})
    # int_0^1 2 sqrt(x (1 - x)) dx
    assert FD.cross_variation_limit(mu, nu, L, iv(0, 1)) == pytest.approx(math.pi / 4, abs=1e-10)


def test_common_coupling_with_equal_measures_is_identical():
    cells = Partition.uniform(0, 1, 50).cells
    X, Y = FD.sample_coupled(L, L, L, cells, 200, seed=3)
    assert np.allclose(X.values, Y.values)
    cv = FD.cross_variation(X, Y)
    assert cv["polarization_residual"] <= 1e-12


def test_unknown_coupling():
    with pytest.raises(ValueError):
        FD.sample_coupled(L, L, L, [iv(0, 1)], 10, 0, "weird")


def test_double_factorial():
    assert [FD.double_factorial(k) for k in (1, 3, 5, 7)] == [1, 3, 15, 105]


@pytest.mark.parametrize("n, expected", [(0, 1.0), (1, 3.0), (2, 15.0)])
def test_moment_rhs_unit_phi(n, expected):
    phi = FD.SimpleFunction.indicator(iv(0, 1))
    r = FD.moment_identity_check(n, phi, phi, SPEC, 2000)
    assert r["rhs"] == pytest.approx(expected)


def test_moment_rejects_large_n():
    phi = FD.SimpleFunction.indicator(iv(0, 1))
    with pytest.raises(ValueError):
        FD.moment_identity_check(FD.MAX_MOMENT_N + 1, phi, phi, SPEC, 10)


def test_ibp_linear_is_exact_on_average():
    phi = FD.SimpleFunction.indicator(iv(0, 1))
    r = FD.gaussian_ibp_check(FD.Polynomial.univariate([0, 1]), [phi], phi, SPEC, 50_000)
    assert r["rhs"] == 1.0 and r["passed"]


def test_ibp_square_has_zero_target():
    phi = FD.SimpleFunction.indicator(iv(0, 0.6))
    psi = FD.SimpleFunction.indicator(iv(0.3, 1))
    r = FD.gaussian_ibp_check(FD.Polynomial.univariate([0, 0, 1]), [phi], psi, SPEC, 50_000)
    assert r["passed"] and abs(r["rhs"]) < 4 * r["se_rhs"] + 1e-12


def test_polynomial_partial():
    p = FD.Polynomial({(2, 1): 3.0, (0, 1): 1.0})
    X = np.array([[2.0, 5.0]])
    assert p(X)[0] == 3 * 4 * 5 + 5
    assert p.partial(0)(X)[0] == 6 * 2 * 5
    assert p.partial(1)(X)[0] == 3 * 4 + 1


def test_radon_nikodym_path_graph():
    g = WeightedGraph.from_edges([1, 1, 1], [[0, 1, 1], [1, 2, 1]])
    r = FD.radon_nikodym_check(g, [0, 1, 0], [[0, 2]])
    assert np.array_equal(r["density"], [-1, 2, -1]) and r["max_diff"] == 0
    assert np.array_equal(FD.radon_nikodym_check(g, [0, 0, 0])["density"], [0, 0, 0])


@given(st.lists(st.floats(-5, 5), min_size=3, max_size=3),
       st.lists(st.floats(-5, 5), min_size=3, max_size=3))
def test_simple_function_inner_is_bilinear(a, b):
    regs = (iv(0, 0.2), iv(0.2, 0.7), iv(0.7, 1))
    f, g = FD.SimpleFunction(a, regs), FD.SimpleFunction(b, regs)
    assert f.inner(g, L) == pytest.approx(g.inner(f, L), abs=1e-12)
    assert f.inner(f, L) == pytest.approx(f.norm_sq(L), abs=1e-12)
