import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sigmafield import graph as GR
from sigmafield.kernels import check_pd

PATH3 = GR.WeightedGraph.from_edges([1, 1, 1], [[0, 1, 1], [1, 2, 1]])
F010 = np.array([0.0, 1.0, 0.0])


def test_laplacian_examples():
    assert np.array_equal(GR.laplacian_apply(PATH3, F010), [-1, 2, -1])
    assert np.all(GR.laplacian_apply(PATH3, [3, 3, 3]) == 0)
    iso = GR.WeightedGraph.from_edges([1, 1, 1], [[0, 1, 1]])
    assert GR.laplacian_apply(iso, [1, 5, 9])[2] == 0


def test_energy_examples():
    assert GR.energy_inner(PATH3, F010, F010) == 2
    assert GR.energy_inner(PATH3, [2, 2, 2], F010) == 0
    h = np.array([1.0, -2.0, 0.5])
    assert GR.energy_inner(PATH3, F010, 3 * h) == 3 * GR.energy_inner(PATH3, F010, h)


def test_greens_identity_examples():
    r = GR.greens_identity_check(PATH3, [4, 4, 4], F010)
    assert r["lhs"] == 0 and r["rhs"] == 0
    r = GR.greens_identity_check(PATH3, F010, F010)
    assert r["lhs"] == r["rhs"] == 2


def test_energy_kernel_examples():
    allv = [0, 1, 2]
    assert GR.energy_kernel(PATH3, allv, allv) == 0
    assert GR.energy_kernel(PATH3, [0], [1]) == -1
    assert GR.energy_kernel(PATH3, [0], [2]) == 0


def test_adjoint_middle_state():
    r = GR.adjoint_check(PATH3, F010, F010, [[1], [0, 2], [0, 1, 2]])
    assert r["mu_f"] == [2.0, -2.0, 0.0]


def test_markov_kernel_examples():
    P = GR.markov_kernel(PATH3)
    assert P[1, 0] == P[1, 2] == 0.5
    assert np.allclose(GR.stationary_distribution(PATH3), [0.25, 0.5, 0.25])
    iso = GR.WeightedGraph.from_edges([1, 1, 1], [[0, 1, 1]])
    with pytest.raises(ValueError, match="absorbing"):
        GR.markov_kernel(iso)
    assert GR.markov_kernel(iso, absorbing=True)[2, 2] == 1.0


def test_two_state_variance_decomposition():
    g = GR.WeightedGraph.from_edges([1, 1], [[0, 1, 1]])
    r = GR.variance_decomposition_check(g, [0, 1])
    assert r["energy"] == 1.0 and r["decomposition"] == 1.0
    assert GR.variance_decomposition_check(g, [2, 2])["energy"] == 0


def test_chain_reproducible_and_balanced():
    g = GR.WeightedGraph.from_edges([1, 1], [[0, 1, 1]])
    a = GR.simulate_chain(PATH3, 0, 1000, 2, seed=9)
    b = GR.simulate_chain(PATH3, 0, 1000, 2, seed=9)
    assert np.array_equal(a.trajectories, b.trajectories)
    run = GR.simulate_chain(g, 0, 10_000, 1, seed=1)
    assert np.allclose(run.occupation, [0.5, 0.5])
    run = GR.simulate_chain(PATH3, 0, 200_000, 1, seed=1)
    assert run.tv_distance([0.25, 0.5, 0.25]) < 0.02


def test_reducible_chain_warns():
    g = GR.WeightedGraph.from_edges([1, 1, 1, 1], [[0, 1, 1], [2, 3, 1]])
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        run = GR.simulate_chain(g, 0, 100, 1, seed=0)
    assert run.occupation is None
    assert any(issubclass(w.category, GR.ReducibleChainWarning) for w in rec)


def test_validation():
    with pytest.raises(ValueError):
        GR.WeightedGraph(np.ones(2), np.array([[0, 1], [2, 0.0]]))
    with pytest.raises(ValueError):
        GR.WeightedGraph(np.array([1.0, -1.0]), np.zeros((2, 2)))
    with pytest.raises(ValueError):
        GR.WeightedGraph.from_edges([1, 1], [[0, 0, 1]])


def test_from_json_and_csv(tmp_path):
    g = GR.WeightedGraph.from_json('{"mu": [1, 1, 1], "edges": [[0, 1, 1], [1, 2, 1]]}')
    assert np.array_equal(g.W, PATH3.W)
    p = tmp_path / "adj.csv"
    p.write_text("0,1,0\n1,0,1\n0,1,0\n")
    assert np.array_equal(GR.WeightedGraph.from_adjacency_csv(p).W, PATH3.W)


def test_membership_vs_energy_on_path():
    r = GR.membership_vs_energy(PATH3, [1.0, -0.5], [[0], [1, 2]])
    assert r["passed"]


graphs = st.builds(lambda n, seed: GR.WeightedGraph.random(n, np.random.default_rng(seed)),
                   st.integers(2, 12), st.integers(0, 2**32 - 1))


@given(graphs, st.integers(0, 2**32 - 1))
def test_identities_on_random_graphs(g, seed):
    rng = np.random.default_rng(seed)
    f, phi = rng.normal(size=g.n), rng.normal(size=g.n)
    tol = 1e-10 * g.scale * g.n * max(1.0, np.abs(f).max() * np.abs(phi).max())
    r = GR.greens_identity_check(g, phi, f)
    assert r["diff"] <= tol
    A = list(np.flatnonzero(rng.random(g.n) < 0.5))
    B = list(np.flatnonzero(rng.random(g.n) < 0.5))
    assert abs(GR.energy_kernel(g, A, B) - g.energy_inner(g.indicator(A), g.indicator(B))) <= 1e-12 * g.scale * g.n
    assert g.energy_inner(f, f) >= -1e-12
    subsets = [list(np.flatnonzero(rng.random(g.n) < 0.5)) for _ in range(5)]
    pd = check_pd(GR.energy_kernel_gram(g, subsets))
    assert pd.min_eigenvalue >= -1e-10 * max(pd.scale, 1.0)
    if np.all(g.rowsum > 0):
        assert GR.detailed_balance_residual(g) <= 1e-12 * g.scale
        assert GR.variance_decomposition_check(g, f)["passed"]
        assert GR.stationary_residual(g) <= 1e-12
