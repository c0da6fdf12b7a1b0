"""
Finite state spaces carrying a vertex measure ``mu`` and a symmetric edge
measure ``rho`` (the weight matrix ``W``).

The slices of ``rho`` give ``c(x) = sum_y W[x, y] / mu[x]`` and
``nu = c mu``; from these come the Laplacian
``(Delta f)(x) = sum_y W[x, y] (f(x) - f(y)) / mu[x]``, the energy form, the
kernel ``beta(A, B) = nu(A & B) - rho(A x B)`` and the reversible chain
``P = W / rowsum``.  Every identity here is a finite sum, so the checks are
exact up to rounding.
"""

from __future__ import annotations

import bisect
import json
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components

from . import _rng


class ReducibleChainWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class WeightedGraph:
    """Vertex masses ``mu > 0`` and weights ``W`` (symmetric, zero diagonal, ``>= 0``)."""

    mu: np.ndarray
    W: np.ndarray

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float)
        W = np.asarray(self.W, dtype=float)
        if mu.ndim != 1 or W.shape != (len(mu), len(mu)):
            raise ValueError("mu must be a vector and W a matching square matrix")
        if np.any(mu <= 0) or not np.all(np.isfinite(mu)):
            raise ValueError("mu must be positive and finite")
        if not np.all(np.isfinite(W)) or np.any(W < 0):
            raise ValueError("W must be finite and nonnegative")
        if not np.array_equal(W, W.T):
            raise ValueError("W must be exactly symmetric")
        if np.any(np.diag(W) != 0):
            raise ValueError("W must have a zero diagonal")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "W", W)

    @classmethod
    def from_edges(cls, mu: Sequence[float], edges: Sequence) -> "WeightedGraph":
        """Build from ``[[x, y, w], ...]``; each undirected edge listed once."""
        n = len(mu)
        W = np.zeros((n, n))
        for x, y, w in edges:
            x, y = int(x), int(y)
            if x == y:
                raise ValueError(f"self-loop at state {x}")
            W[x, y] += float(w)
            W[y, x] += float(w)
        return cls(np.asarray(mu, dtype=float), W)

    @classmethod
    def from_json(cls, text_or_obj) -> "WeightedGraph":
        obj = json.loads(text_or_obj) if isinstance(text_or_obj, str) else text_or_obj
        return cls.from_edges(obj["mu"], obj.get("edges", []))

    @classmethod
    def from_adjacency_csv(cls, path, mu: Sequence[float] | None = None) -> "WeightedGraph":
        W = np.loadtxt(path, delimiter=",", ndmin=2)
        return cls(np.ones(len(W)) if mu is None else np.asarray(mu, dtype=float), W)

    @classmethod
    def random(cls, n: int, rng: np.random.Generator, density: float = 0.5) -> "WeightedGraph":
        """Random graph for property tests."""
        W = np.triu(rng.random((n, n)) * (rng.random((n, n)) < density), 1)
        return cls(rng.random(n) + 0.1, W + W.T)

    @property
    def n(self) -> int:
        return len(self.mu)

    @property
    def rowsum(self) -> np.ndarray:
        return self.W.sum(axis=1)

    @property
    def c(self) -> np.ndarray:
        return self.rowsum / self.mu

    @property
    def nu(self) -> np.ndarray:
        """``nu(x) = c(x) mu(x)``, the row sums of ``W``."""
        return self.rowsum

    def slice(self, x: int) -> np.ndarray:
        """``rho^(x)(y) = W[x, y] / mu[x]``."""
        return self.W[x] / self.mu[x]

    def laplacian_apply(self, f) -> np.ndarray:
        f = self._vec(f)
        return (self.rowsum * f - self.W @ f) / self.mu

    def energy_inner(self, f, h) -> float:
        """``1/2 sum_{x,y} (f(x) - f(y)) (h(x) - h(y)) W[x, y]``."""
        f, h = self._vec(f), self._vec(h)
        df = f[:, None] - f[None, :]
        dh = h[:, None] - h[None, :]
        return float(0.5 * np.sum(df * dh * self.W))

    def _vec(self, f) -> np.ndarray:
        f = np.asarray(f, dtype=float)
        if f.shape != (self.n,):
            raise ValueError(f"expected a vector of length {self.n}, got shape {f.shape}")
        return f

    def indicator(self, A) -> np.ndarray:
        chi = np.zeros(self.n)
        chi[list(A)] = 1.0
        return chi

    @property
    def scale(self) -> float:
        return float(max(1.0, np.max(self.W) if self.W.size else 0.0, np.max(self.mu)))


def laplacian_apply(g: WeightedGraph, f) -> np.ndarray:
    return g.laplacian_apply(f)


def energy_inner(g: WeightedGraph, f, h) -> float:
    return g.energy_inner(f, h)


def greens_identity_check(g: WeightedGraph, phi, f) -> dict:
    """``<phi, f>_E`` against ``sum phi (Delta f) mu``."""
    lhs = g.energy_inner(phi, f)
    rhs = float(np.sum(np.asarray(phi, dtype=float) * g.laplacian_apply(f) * g.mu))
    scale = g.scale * max(1.0, float(np.max(np.abs(phi))) * float(np.max(np.abs(f)))) * g.n
    return {"lhs": lhs, "rhs": rhs, "diff": abs(lhs - rhs), "tolerance": 1e-10 * scale,
            "passed": abs(lhs - rhs) <= 1e-10 * scale}


def adjoint_check(g: WeightedGraph, phi, f, subsets: Sequence = ()) -> dict:
    """The adjoint form of Green's identity, plus ``mu_f(A) = sum_A (Delta f) mu``."""
    out = greens_identity_check(g, phi, f)
    dens = g.laplacian_apply(f) * g.mu
    out["mu_f"] = [float(np.sum(dens[list(A)])) for A in subsets]
    return out


def energy_kernel(g: WeightedGraph, A, B) -> float:
    """``nu(A & B) - rho(A x B)``."""
    A, B = sorted(set(A)), sorted(set(B))
    inter = sorted(set(A) & set(B))
    return float(np.sum(g.nu[inter]) - np.sum(g.W[np.ix_(A, B)])) if A and B else 0.0


def energy_kernel_gram(g: WeightedGraph, subsets: Sequence) -> np.ndarray:
    n = len(subsets)
    G = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            G[i, j] = G[j, i] = energy_kernel(g, subsets[i], subsets[j])
    return G


def markov_kernel(g: WeightedGraph, absorbing: bool = False) -> np.ndarray:
    """``P[x, y] = W[x, y] / sum_z W[x, z]``.

    States with no edges raise unless ``absorbing`` is set, in which case they
    get ``P[x, x] = 1``.
    """
    rs = g.rowsum
    zero = rs == 0
    if zero.any() and not absorbing:
        raise ValueError(f"states {np.flatnonzero(zero).tolist()} have no edges; "
                         "pass absorbing=True to make them absorbing")
    P = np.divide(g.W, rs[:, None], out=np.zeros_like(g.W), where=~zero[:, None])
    P[zero, zero] = 1.0
    return P


def detailed_balance_residual(g: WeightedGraph, P=None) -> float:
    """``max |c mu P - (c mu P)^T|``; both sides equal ``W``."""
    P = markov_kernel(g) if P is None else P
    F = (g.c * g.mu)[:, None] * P
    return float(np.max(np.abs(F - F.T)))


def stationary_distribution(g: WeightedGraph) -> np.ndarray:
    """Normalized row sums of ``W``."""
    return g.rowsum / g.rowsum.sum()


def stationary_residual(g: WeightedGraph) -> float:
    """``max |pi P - pi|`` for ``pi`` the normalized row sums."""
    pi = stationary_distribution(g)
    return float(np.max(np.abs(pi @ markov_kernel(g) - pi)))


def is_irreducible(g: WeightedGraph) -> bool:
    n_comp, _ = connected_components(g.W > 0, directed=False)
    return n_comp == 1 and bool(np.all(g.rowsum > 0))


@dataclass
class ChainRun:
    trajectories: np.ndarray  # (n_chains, n_steps + 1)
    occupation: np.ndarray | None
    transition_counts: np.ndarray

    def tv_distance(self, target) -> float:
        return float(0.5 * np.sum(np.abs(self.occupation - np.asarray(target))))


def simulate_chain(g: WeightedGraph, x0: int, n_steps: int, n_chains: int = 1, seed: int = 0) -> ChainRun:
    """Run ``n_chains`` copies of the chain from ``x0``.

    Chain ``k`` uses the uniforms of column ``k`` of the chain stream, so each
    trajectory is reproducible on its own.  The empirical occupation pools
    every visited state after the start; it is ``None`` (with a warning) when
    the graph is reducible.
    """
    P = markov_kernel(g)
    cum = np.cumsum(P, axis=1)
    cum[:, -1] = 1.0
    rows = [list(r) for r in cum]
    traj = np.empty((n_chains, n_steps + 1), dtype=np.int64)
    counts = np.zeros((g.n, g.n), dtype=np.int64)
    for k in range(n_chains):
        U = _rng.uniform(seed, _rng.CHAIN, [k], n_steps)[:, 0]
        x = int(x0)
        path = [x]
        for u in U.tolist():
            x = bisect.bisect_right(rows[x], u)
            path.append(x)
        traj[k] = path
        np.add.at(counts, (traj[k, :-1], traj[k, 1:]), 1)
    occ = None
    if is_irreducible(g):
        occ = np.bincount(traj[:, 1:].ravel(), minlength=g.n) / (n_chains * n_steps)
    else:
        warnings.warn("graph is reducible; stationary claims skipped", ReducibleChainWarning, stacklevel=2)
    return ChainRun(traj, occ, counts)


def variance_decomposition_check(g: WeightedGraph, f) -> dict:
    """``|f|_E^2 = 1/2 [sum |f - Pf|^2 nu + sum VAR_x(f(X_1)) nu(x)]``."""
    f = g._vec(f)
    P = markov_kernel(g)
    Pf = P @ f
    var = np.sum(P * (f[None, :] - Pf[:, None]) ** 2, axis=1)
    energy = g.energy_inner(f, f)
    decomposition = float(0.5 * (np.sum((f - Pf) ** 2 * g.nu) + np.sum(var * g.nu)))
    scale = g.scale * max(1.0, float(np.max(f * f))) * g.n
    diff = abs(energy - decomposition)
    return {"energy": energy, "decomposition": decomposition, "diff": diff,
            "variances": var, "tolerance": 1e-10 * scale, "passed": diff <= 1e-10 * scale}


def membership_vs_energy(g: WeightedGraph, coeffs, subsets) -> dict:
    """Norm of ``mu_f`` in the RKHS of ``beta`` against ``|f|_E^2``.

    For ``f = sum a_i chi_{A_i}`` the measure ``mu_f(B) = <chi_B, f>_E`` is
    sampled on the subsets; the finite-sample bound on its norm in the RKHS of
    the energy kernel must not exceed the energy of ``f``.
    """
    from .kernels import membership_bound

    f = sum(a * g.indicator(A) for a, A in zip(coeffs, subsets))
    G = energy_kernel_gram(g, subsets)
    vals = np.array([g.energy_inner(g.indicator(B), f) for B in subsets])
    bound = membership_bound(G, vals)
    energy = g.energy_inner(f, f)
    return {"bound": bound, "energy": energy, "passed": bound <= energy * (1 + 1e-9) + 1e-12}
