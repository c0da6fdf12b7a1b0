"""
Shannon sampling on a finite window of integers.

``f(x) = sum_{|n| <= N} a_n sinc(x - n)`` with ``sinc(u) = sin(pi u) / (pi u)``.
The translates ``sinc(. - n)`` are orthonormal in ``L^2(R)`` and reproduce
the kernel ``sinc(x - y)``, so reconstruction from samples is an isometry
from ``l^2`` onto the band-limited functions and sampling is its adjoint.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .kernels import KernelSpec, gram


class LeakageWarning(RuntimeWarning):
    pass


def sinc(u):
    """``sin(pi u) / (pi u)``, exactly 1 at 0 and exactly 0 at nonzero integers."""
    u = np.asarray(u, dtype=float)
    out = np.sinc(u)
    ints = (u == np.round(u))
    out = np.where(ints, (u == 0).astype(float), out)
    return float(out) if out.ndim == 0 else out


def sinc_kernel(x, y):
    return sinc(np.asarray(x, dtype=float) - np.asarray(y, dtype=float))


SINC = KernelSpec(sinc_kernel, "points", "sinc")


@dataclass(frozen=True)
class BandlimitedSignal:
    """Coefficients ``a_n`` for ``n = -N..N``."""

    coefficients: tuple

    def __post_init__(self):
        c = tuple(float(a) for a in self.coefficients)
        if len(c) % 2 != 1:
            raise ValueError("need an odd number of coefficients, indexed -N..N")
        object.__setattr__(self, "coefficients", c)

    @classmethod
    def from_dict(cls, coeffs: dict, N: int | None = None) -> "BandlimitedSignal":
        """From ``{n: a_n}``; the window is the smallest symmetric one unless ``N`` is given."""
        if N is None:
            N = max((abs(int(n)) for n in coeffs), default=0)
        arr = np.zeros(2 * N + 1)
        for n, a in coeffs.items():
            if abs(int(n)) > N:
                raise ValueError(f"index {n} outside window [-{N}, {N}]")
            arr[int(n) + N] = a
        return cls(tuple(arr))

    @property
    def N(self) -> int:
        return (len(self.coefficients) - 1) // 2

    @property
    def window(self) -> np.ndarray:
        return np.arange(-self.N, self.N + 1)

    @property
    def alpha(self) -> np.ndarray:
        return np.array(self.coefficients)


def reconstruct(sig: BandlimitedSignal, x):
    """``sum_n a_n sinc(x - n)``."""
    x = np.asarray(x, dtype=float)
    vals = sinc(x[..., None] - sig.window) @ sig.alpha
    return float(vals) if np.ndim(vals) == 0 else vals


def sample(f: Callable, window) -> np.ndarray:
    """``(f(n))_n`` over the integers of ``window`` (an ``N`` or an iterable)."""
    ns = np.arange(-window, window + 1) if isinstance(window, (int, np.integer)) else np.asarray(window)
    return np.array([float(f(int(n))) for n in ns])


def _tail_sum(sig, x):
    """``g(x) = sum a_n (-1)^n / (x - n)``, so ``f(x) = sin(pi x) g(x) / pi``."""
    signs = np.where(sig.window % 2 == 0, 1.0, -1.0)
    return (1.0 / (x[..., None] - sig.window)) @ (sig.alpha * signs)


def quadrature_norm_sq(sig: BandlimitedSignal, L: float | None = None, panels_per_unit: int = 4,
                       order: int = 16) -> tuple[float, float]:
    """``int |f|^2 dx`` on ``[-L, L]`` plus an estimate of the rest.

    Composite Gauss-Legendre on ``[-L, L]``.  Beyond it
    ``f(x)^2 = sin^2(pi x) g(x)^2 / pi^2`` with slowly varying ``g``, so the
    remainder is ``int g^2 / (2 pi^2)`` (averaging ``sin^2``), integrated with a
    substitution ``x = L / s``.  Returns ``(total, remainder)``.
    """
    N = sig.N
    if L is None:
        L = float(max(4 * N, 512))
    n_pan = int(math.ceil(2 * L * panels_per_unit))
    edges = np.linspace(-L, L, n_pan + 1)
    z, w = np.polynomial.legendre.leggauss(order)
    h = np.diff(edges)
    x = ((edges[:-1, None] + edges[1:, None]) / 2 + h[:, None] / 2 * z).ravel()
    wt = (h[:, None] / 2 * w).ravel()
    core = float(np.sum(reconstruct(sig, x) ** 2 * wt))
    # tails: x = +-L/s, dx = L/s^2 ds, s in (0, 1]
    s, ws = np.polynomial.legendre.leggauss(64)
    s = (s + 1) / 2
    ws = ws / 2
    xs = L / s
    tail = 0.0
    for sign in (1.0, -1.0):
        g = _tail_sum(sig, sign * xs)
        tail += float(np.sum(g**2 / (2 * math.pi**2) * L / s**2 * ws))
    return core + tail, tail


def isometry_check(sig: BandlimitedSignal, L: float | None = None, leak_tol: float = 1e-3) -> dict:
    """``|a|^2`` against the Gram form ``a^T K a`` and a quadrature of ``|f|^2``."""
    l2 = float(sig.alpha @ sig.alpha)
    K = gram(SINC, list(sig.window)).entries
    pw = float(sig.alpha @ K @ sig.alpha)
    quad, tail = quadrature_norm_sq(sig, L)
    if tail > leak_tol * max(l2, 1e-300):
        warnings.warn(f"window energy leaks beyond the integration domain (tail {tail:.2e})",
                      LeakageWarning, stacklevel=2)
    return {"l2_norm_sq": l2, "pw_norm_sq": pw, "diff": abs(l2 - pw),
            "quadrature_norm_sq": quad, "quadrature_diff": abs(quad - l2), "tail": tail}


def half_shift_samples(window) -> np.ndarray:
    """Closed form of ``sinc(n - 1/2) = (-1)^(n+1) 2 / ((2n - 1) pi)``."""
    ns = np.arange(-window, window + 1) if isinstance(window, (int, np.integer)) else np.asarray(window)
    return np.where(ns % 2 == 0, -1.0, 1.0) * 2 / ((2 * ns - 1) * math.pi)
