"""The Gaussian field X_A with E[X_A X_B] = mu(A & B), its Ito integral and quadratic variation."""

import numpy as np

from sigmafield import field as FD
from sigmafield.measures import LebesgueMeasure, Partition, Region

leb = LebesgueMeasure()
spec = FD.FieldSpec(leb, seed=1)
A, B = Region.interval(0, 0.5), Region.interval(0.25, 0.75)

ens = FD.sample_field(spec, [A, B], 200_000)
cov, se = ens.cov(0, 1)
print(f"cov(X_A, X_B) = {cov:.4f} +- {se:.4f}  (mu(A & B) = 0.25)")

# simple functions integrate linearly; variance is the L2 norm
phi = FD.SimpleFunction((2.0, -1.0), (Region.interval(0, 0.3), Region.interval(0.3, 1)))
x = FD.sample_integrals(spec, [phi], 100_000)[:, 0]
print(f"Var X_phi = {x.var():.4f}  (|phi|^2 = {phi.norm_sq(leb):.4f})")

# quadratic variation over finer partitions concentrates at mu([0, 1]) = 1
for n in (10, 100, 1000):
    st = FD.qv_partition_statistics(spec, Partition.uniform(0, 1, n), 5_000)
    print(f"n={n:5d}  E|1 - QV|^2 = {st['mse']:.5f}  vs 2/n = {2 / n:.5f}")

# Karhunen-Loeve: a field built from 256 Haar coordinates
basis = FD.OrthonormalBasis("haar", 256)
print("\nHaar Parseval partial sum for mu(A & B):", FD.kl_truncated_covariance(basis, A, B))
kl = FD.kl_sample(basis, [A, B], 100_000, seed=2)
print("KL sample covariance:", round(kl.cov(0, 1)[0], 4))

# Gaussian integration by parts and the odd moment identity
psi = FD.SimpleFunction.indicator(Region.interval(0.2, 0.6))
r = FD.gaussian_ibp_check(FD.Polynomial.univariate([0, 0, 0, 1]), [phi], psi, spec, 200_000)
print(f"IBP with p = x^3: lhs {r['lhs']:.4f}  rhs {r['rhs']:.4f}  (4 SE = {4 * r['se']:.4f})")
r = FD.moment_identity_check(2, phi, psi, spec, 200_000, "odd")
print(f"E[X_phi^5 X_psi] = {r['lhs']:.3f}  vs 15 |phi|^4 <phi, psi> = {r['rhs']:.3f}  (5 SE = {5 * r['se']:.3f})")
