"""Brownian motion run on the clock h(t): covariance, Ito formula and the diffusion equation."""

import numpy as np

from sigmafield import timechange as TC

sq = TC.TimeChange.named("power:2")
print("cov(X_1, X_2) for h = t^2:", TC.tc_covariance(sq, 1, 2))

e = TC.simulate_tc(sq, [1.0, 2.0], 100_000, seed=4)
print("sample:", round(e.cov(0, 1)[0], 4))

# u(t, x) = E f(x + B_h(t)) three ways, at t = 1.5
for name in ("linear", "power:2"):
    r = TC.mc_vs_pde(TC.TimeChange.named(name), "exp-bump", 1.5, 0.0, 200_000, seed=5)
    print(f"h={name:8s} PDE {r['u_pde']:.5f}  quadrature {r['u_quadrature']:.5f}  MC {r['u_mc']:.5f}")

# the discrete Ito residual is a first-order Euler bias
r = TC.ito_formula_residual(sq, "exp-bump", 1.0, 16, 50_000, seed=6, levels=5)
for g, m in zip(r["grids"], r["means"]):
    print(f"grid {g:4d}: mean residual {m: .2e}")
print("fitted order:", round(r["slope"], 2))

# a clock that stops at t = 1/2 freezes the solution
frozen = TC.TimeChange.named([[0, 0], [0.5, 0.5], [1, 0.5]])
f = TC.named_function("exp-bump")[0]
a = TC.diffusion_solve(frozen, f, 0.5, n_t=200)
b = TC.diffusion_solve(frozen, f, 1.0, n_t=400)
print("\nu(1/2, .) == u(1, .) when h is flat on [1/2, 1]:", np.array_equal(a.u, b.u))
