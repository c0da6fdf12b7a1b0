"""Measures on regions, and the kernel beta(A, B) = mu(A & B) they induce."""

from fractions import Fraction

import numpy as np

from sigmafield.kernels import SignedMeasureElement, beta_kernel, check_pd, gram, membership_bound
from sigmafield.measures import CantorMeasure, LebesgueMeasure, Partition, Region, refine

leb = LebesgueMeasure()
cantor = CantorMeasure(30)

print("Lebesgue [0, 1/2):", leb.measure(Region.interval(0, 0.5)))
print("Cantor [0, 1/3):  ", cantor.measure(Region.interval(0, Fraction(1, 3))))
print("Cantor [1/3, 2/3):", cantor.measure(Region.interval(Fraction(1, 3), Fraction(2, 3))))
print("Cantor staircase at 1/4:", cantor.cumulative(Fraction(1, 4)))

# equal-mass refinement follows the measure, not the length
cells = refine(Partition.uniform(0, 1, 1), 4, cantor).cells
print("Cantor quarter-mass cells:", [str(c) for c in cells])

regions = [Region.interval(a, b) for a, b in [(0, 0.5), (0.25, 0.75), (0.5, 1.0), (0.1, 0.9)]]
G = gram(beta_kernel(leb), regions)
print("\nGram of mu(A & B):\n", G.entries)
print("positive semidefinite:", check_pd(G))

# the measure with density x is an element of the kernel space; the finite
# sample bound on its squared norm creeps up towards int x^2 dx = 1/3
e = SignedMeasureElement(lambda x: x, leb)
rng = np.random.default_rng(0)
for n in (4, 16, 64):
    ab = np.sort(rng.random((n, 2)), axis=1)
    regs = [Region.interval(a, b) for a, b in ab]
    vals = [e.evaluate(r) for r in regs]
    print(f"n={n:3d} membership bound {membership_bound(gram(beta_kernel(leb), regs), vals, tol=1e-6):.4f}")
print("exact norm^2:", e.norm_sq())

stair = SignedMeasureElement(lambda x: np.ones_like(x), cantor)
print("\nCantor staircase has unit density w.r.t. the Cantor measure; norm^2 =", stair.norm_sq())
