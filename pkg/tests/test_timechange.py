import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sigmafield import timechange as TC
from sigmafield.field import PathEnsemble

LIN = TC.TimeChange.named("linear")
SQ = TC.TimeChange.named("power:2")
FROZEN = TC.TimeChange.named([[0, 0], [0.5, 0.5], [1, 0.5]])


def test_covariance_examples():
    assert TC.tc_covariance(SQ, 1, 2) == 1.0
    assert TC.tc_covariance(LIN, 0.3, 0.8) == 0.3
    assert TC.tc_covariance(SQ, 0, 2) == 0.0


@pytest.mark.parametrize("bad", [[[0, 0]], [[0.1, 0], [1, 1]], [[0, 0], [1, 1], [0.5, 2]], [[0, 0], [1, 1], [2, 0.5]]])
def test_table_validation(bad):
    with pytest.raises(ValueError, match="h:"):
        TC.TimeChange.named(bad)


def test_bad_names():
    for spec in ("power:-1", "power:x", "quadratic"):
        with pytest.raises(ValueError, match="h:"):
            TC.TimeChange.named(spec)
    with pytest.raises(ValueError, match="f:"):
        TC.named_function("tanh")


def test_table_derivative_is_right_derivative():
    tc = TC.TimeChange.named([[0, 0], [1, 2], [2, 2.5]])
    assert np.allclose(tc.dh([0.0, 0.5, 1.0, 1.5, 2.0, 3.0]), [2, 2, 0.5, 0.5, 0, 0])


def test_simulated_covariance():
    n = 100_000
    e = TC.simulate_tc(SQ, [1.0, 2.0], n, seed=5)
    c, se = e.cov(0, 1)
    assert abs(c - 1.0) <= 4 * se
    v, sev = e.cov(1, 1)
    assert abs(v - 4.0) <= 4 * sev


def test_disjoint_increments_uncorrelated():
    e = TC.simulate_tc(SQ, [0.5, 1.0, 1.5], 100_000, seed=6)
    d1 = e.values[:, 1] - e.values[:, 0]
    d2 = e.values[:, 2] - e.values[:, 1]
    prod = d1 * d2
    assert abs(prod.mean()) <= 4 * prod.std(ddof=1) / math.sqrt(len(prod))


def test_quadratic_variation_and_telescoping():
    edges = list(np.linspace(0, 1, 51))
    e = TC.simulate_tc(SQ, edges[1:], 20_000, seed=7)
    full = PathEnsemble(np.hstack([np.zeros((e.n_paths, 1)), e.values]), tuple(edges))
    qv = TC.tc_quadratic_variation(SQ, edges, full)
    assert abs(qv.mean() - 1.0) <= 4 * qv.std(ddof=1) / math.sqrt(len(qv))
    s, total = TC.qv_telescoping(SQ, edges)
    assert s == pytest.approx(total, abs=1e-15) and total == 1.0
    with pytest.raises(ValueError):
        TC.tc_quadratic_variation(SQ, edges[:-1], full)


def test_gauss_hermite_moments():
    assert TC.gauss_hermite_expectation(lambda x: x * x, 0.7, 2.0) == pytest.approx(0.49 + 2.0, rel=1e-13)
    assert TC.gauss_hermite_expectation(lambda x: x**4, 0.0, 1.0) == pytest.approx(3.0, rel=1e-13)


@pytest.mark.parametrize("tc, ht", [(LIN, 1.0), (SQ, 1.0)])
def test_pde_square(tc, ht):
    f = TC.named_function("square")[0]
    sol = TC.diffusion_solve(tc, f, 1.0, 0.0)
    core = np.abs(sol.x) <= 2
    assert np.max(np.abs(sol.u[core] - (sol.x[core] ** 2 + ht))) < 1e-6


def test_pde_frozen_where_clock_stops():
    f = TC.named_function("exp-bump")[0]
    a = TC.diffusion_solve(FROZEN, f, 0.5, n_t=200)
    b = TC.diffusion_solve(FROZEN, f, 1.0, n_t=400)
    assert np.array_equal(a.x, b.x)
    assert np.array_equal(a.u, b.u)


@pytest.mark.parametrize("name, expected", [("one", lambda x0: 1.0), ("x", lambda x0: x0)])
def test_mc_vs_pde_trivial(name, expected):
    r = TC.mc_vs_pde(SQ, name, 1.0, 0.3, 20_000, seed=1)
    for key in ("u_pde", "u_quadrature"):
        assert r[key] == pytest.approx(expected(0.3), abs=1e-9)
    assert r["passed"]


def test_three_way_bump():
    r = TC.mc_vs_pde(SQ, "exp-bump", 1.0, 0.0, 200_000, seed=2)
    assert r["passed"]
    assert abs(r["u_pde"] - r["u_quadrature"]) <= 1e-2


def test_ito_residual_square_linear():
    r = TC.ito_formula_residual(LIN, "square", 1.0, 256, 20_000, seed=3)
    assert abs(r["mean_residual"]) <= 4 * r["se"]


def test_ito_residual_shrinks():
    r = TC.ito_formula_residual(SQ, "exp-bump", 1.0, 16, 20_000, seed=3, levels=4)
    m = np.abs(r["means"])
    assert np.all(m[1:] < m[:-1])
    assert 0.5 < r["slope"] < 1.5


def test_solver_guards():
    f = TC.named_function("one")[0]
    with pytest.raises(ValueError):
        TC.diffusion_solve(LIN, f, 1.0, n_x=2)
    with pytest.raises(ValueError):
        TC.diffusion_solve(LIN, f, 1.0, boundary="periodic")


@given(st.floats(0.2, 3.0), st.floats(0, 2), st.floats(0, 2))
def test_power_covariance_is_h_of_min(p, s, t):
    tc = TC.TimeChange.named(f"power:{p}")
    assert TC.tc_covariance(tc, s, t) == pytest.approx(min(s, t) ** p)


@given(st.lists(st.floats(0.01, 1), min_size=2, max_size=6))
def test_table_h_is_monotone(incs):
    ts = np.concatenate([[0], np.cumsum(incs)])
    hs = np.concatenate([[0], np.cumsum(np.array(incs) ** 2)])
    tc = TC.TimeChange.named(np.column_stack([ts, hs]).tolist())
    grid = np.linspace(0, ts[-1] * 1.2, 50)
    assert np.all(np.diff(tc.h(grid)) >= 0)
    assert tc.h(grid[-1]) == pytest.approx(hs[-1])
