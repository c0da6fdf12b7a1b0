"""A weighted graph: Laplacian, energy, the kernel nu(A & B) - rho(A x B), and the reversible chain."""

import numpy as np

from sigmafield import graph as GR

g = GR.WeightedGraph.from_edges([1.0, 2.0, 0.5, 1.0],
                                [[0, 1, 1.0], [1, 2, 3.0], [0, 2, 0.5], [2, 3, 2.0]])
f = np.array([0.0, 1.0, -1.0, 2.0])
phi = np.array([1.0, 0.5, 0.0, -1.0])

print("Delta f:", g.laplacian_apply(f))
r = GR.greens_identity_check(g, phi, f)
print(f"Green: <phi, f>_E = {r['lhs']:.6f}, sum phi Delta f mu = {r['rhs']:.6f}")

A, B = [0, 1], [1, 2, 3]
print("beta(A, B) =", GR.energy_kernel(g, A, B), " <chi_A, chi_B>_E =", g.energy_inner(g.indicator(A), g.indicator(B)))

v = GR.variance_decomposition_check(g, f)
print(f"energy {v['energy']:.6f} = decomposition {v['decomposition']:.6f}")

P = GR.markov_kernel(g)
print("\ntransition matrix:\n", P.round(3))
print("detailed balance residual:", GR.detailed_balance_residual(g))
run = GR.simulate_chain(g, 0, 1_000_000, 1, seed=7)
print("occupation:", run.occupation.round(4))
print("row sums  :", GR.stationary_distribution(g).round(4))
print("TV distance:", round(run.tv_distance(GR.stationary_distribution(g)), 5))
