"""Band-limited functions on a window of integers: reconstruction, sampling and the isometry."""

import numpy as np

from sigmafield import shannon as SH

rng = np.random.default_rng(8)
sig = SH.BandlimitedSignal(tuple(rng.normal(size=65)))  # n = -32..32

xs = np.array([0.0, 0.25, 0.5, 10.5])
print("f at", xs, "=", SH.reconstruct(sig, xs).round(5))
back = SH.sample(lambda x: SH.reconstruct(sig, x), sig.N)
print("sampling recovers the coefficients:", np.array_equal(back, sig.alpha))

r = SH.isometry_check(sig)
print(f"|a|^2 = {r['l2_norm_sq']:.6f}, a^T K a = {r['pw_norm_sq']:.6f}, int |f|^2 = {r['quadrature_norm_sq']:.6f}")

print("\nsinc(n - 1/2) for n = -2..3:", SH.sample(lambda x: SH.sinc(x - 0.5), np.arange(-2, 4)).round(5))
print("closed form (-1)^(n+1) 2/((2n-1) pi):", SH.half_shift_samples(np.arange(-2, 4)).round(5))
