"""
Time-changed Brownian motion ``X_t = x0 + B_{h(t)}``.

The covariance is ``h(s & t)`` and the quadratic-variation measure is
``h'(t) dt``.  ``u(t, x) = E[f(x + B_{h(t)})]`` solves
``du/dt = h'(t)/2 d2u/dx2`` with ``u(0, .) = f``; it is computed three ways
here (Gauss-Hermite quadrature of the exact Gaussian law, Crank-Nicolson,
and Monte Carlo) and compared.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import solve_banded

from . import _rng
from .field import PathEnsemble


@dataclass(frozen=True)
class TimeChange:
    """Monotone clock ``h`` with ``h(0) = 0`` and its right derivative."""

    h: Callable
    dh: Callable
    name: str = "custom"
    T: float = math.inf

    @classmethod
    def named(cls, spec) -> "TimeChange":
        """``"linear"``, ``"power:p"`` (``t^p``) or a table ``[[t, h], ...]``."""
        if spec == "linear":
            return cls(lambda t: np.asarray(t, dtype=float) * 1.0,
                       lambda t: np.ones_like(np.asarray(t, dtype=float)), "linear")
        if isinstance(spec, str) and spec.startswith("power:"):
            try:
                p = float(spec.split(":", 1)[1])
            except ValueError as exc:
                raise ValueError(f"h: bad exponent in {spec!r}") from exc
            if p <= 0:
                raise ValueError("h: power exponent must be positive")

            def dh(t):
                with np.errstate(divide="ignore"):
                    return p * np.asarray(t, dtype=float) ** (p - 1)
            return cls(lambda t: np.asarray(t, dtype=float) ** p, dh, spec)
        if isinstance(spec, (list, tuple)) or isinstance(spec, np.ndarray):
            return cls.from_table(spec)
        raise ValueError(f"h: unknown time change {spec!r}")

    @classmethod
    def from_table(cls, points) -> "TimeChange":
        """Piecewise-linear ``h`` through ``(t, h)`` points; flat after the last."""
        arr = np.asarray(points, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2 or len(arr) < 2:
            raise ValueError("h: table must be at least two [t, h] pairs")
        ts, hs = arr[:, 0], arr[:, 1]
        if ts[0] != 0 or hs[0] != 0:
            raise ValueError("h: table must start at [0, 0]")
        if np.any(np.diff(ts) <= 0):
            raise ValueError("h: table times must increase strictly")
        if np.any(np.diff(hs) < 0):
            raise ValueError("h: table values must be nondecreasing")
        slopes = np.diff(hs) / np.diff(ts)

        def h(t):
            return np.interp(t, ts, hs)

        def dh(t):
            t = np.asarray(t, dtype=float)
            k = np.searchsorted(ts, t, side="right") - 1
            inside = (k >= 0) & (k < len(slopes))
            return np.where(inside, slopes[np.clip(k, 0, len(slopes) - 1)], 0.0)
        return cls(h, dh, "table", float(ts[-1]))


def tc_covariance(tc: TimeChange, s, t):
    out = tc.h(np.minimum(np.asarray(s, dtype=float), np.asarray(t, dtype=float)))
    return float(out) if np.ndim(out) == 0 else out


def _increments(tc: TimeChange, times, n_paths, seed, offset=0):
    times = np.asarray(times, dtype=float)
    hv = tc.h(np.concatenate([[0.0], times]))
    dvar = np.diff(hv)
    if np.any(dvar < -1e-15):
        raise ValueError("h must be nondecreasing along the times")
    Z = _rng.standard_normal(seed, _rng.TIMECHANGE, range(len(times)), n_paths, offset)
    return Z * np.sqrt(np.clip(dvar, 0.0, None))


def simulate_tc(tc: TimeChange, times: Sequence[float], n_paths: int, seed: int, x0: float = 0.0) -> PathEnsemble:
    """``x0 + B_{h(t_i)}`` from independent Gaussian increments of variance ``h(t_i) - h(t_{i-1})``."""
    times = [float(t) for t in times]
    if any(b < a for a, b in zip(times, times[1:])) or (times and times[0] < 0):
        raise ValueError("times must be nonnegative and sorted")
    vals = x0 + np.cumsum(_increments(tc, times, n_paths, seed), axis=1)
    return PathEnsemble(vals, tuple(times), seed, {"h": tc.name})


def tc_quadratic_variation(tc: TimeChange, edges: Sequence[float], ensemble: PathEnsemble) -> np.ndarray:
    """``sum (X_{t_{i+1}} - X_{t_i})^2`` per path over the cells between ``edges``.

    ``ensemble`` holds the path at ``edges``; a missing leading ``0`` is
    treated as ``X_0 = x0`` with ``x0`` taken from ``ensemble.meta``.
    """
    edges = [float(e) for e in edges]
    if list(ensemble.items) != edges:
        raise ValueError("ensemble must be sampled at the partition edges")
    return np.sum(np.diff(ensemble.values, axis=1) ** 2, axis=1)


def qv_telescoping(tc: TimeChange, edges: Sequence[float]) -> tuple[float, float]:
    """``(sum_i h(t_{i+1}) - h(t_i), h(t_end) - h(t_0))``."""
    hv = tc.h(np.asarray(edges, dtype=float))
    return float(np.sum(np.diff(hv))), float(hv[-1] - hv[0])


# -- test functions for the Ito formula ------------------------------------

def _bump(x):
    return np.exp(-0.5 * x * x)


FUNCTIONS = {
    "one": (lambda x: np.ones_like(x), lambda x: np.zeros_like(x), lambda x: np.zeros_like(x)),
    "x": (lambda x: x, lambda x: np.ones_like(x), lambda x: np.zeros_like(x)),
    "square": (lambda x: x * x, lambda x: 2 * x, lambda x: np.full_like(x, 2.0)),
    "cube": (lambda x: x**3, lambda x: 3 * x * x, lambda x: 6 * x),
    "sin": (np.sin, np.cos, lambda x: -np.sin(x)),
    "exp-bump": (_bump, lambda x: -x * _bump(x), lambda x: (x * x - 1) * _bump(x)),
}


def named_function(name: str):
    """``(f, f', f'')`` for a registered test function."""
    try:
        return FUNCTIONS[name]
    except KeyError:
        raise ValueError(f"f: unknown function {name!r}; choose from {sorted(FUNCTIONS)}") from None


def ito_formula_residual(tc: TimeChange, f: str, t: float, grid: int, n_paths: int, seed: int,
                         x0: float = 0.0, levels: int = 1, chunk: int = 2048) -> dict:
    """Monte Carlo mean of the discrete Ito-formula residual.

    Per path the residual is
    ``f(X_t) - f(X_0) - sum f'(X_i) dX_i - 1/2 sum f''(X_i) h'(t_i) dt_i``
    on a uniform grid of ``[0, t]``.  With ``levels > 1`` the residual is also
    computed on grids ``grid * 2^k``, all subsampled from one fine path (common
    random numbers), and the slope of ``log|mean|`` against ``log(mesh)`` is
    fitted; the Euler bias makes it about 1.
    """
    F, dF, d2F = named_function(f)
    fine = grid * 2 ** (levels - 1)
    tf = np.linspace(0.0, t, fine + 1)
    sums = np.zeros(levels)
    sq = np.zeros(levels)
    for off in range(0, n_paths, chunk):
        m = min(chunk, n_paths - off)
        X = np.empty((m, fine + 1))
        X[:, 0] = x0
        np.cumsum(_increments(tc, tf[1:], m, seed, off), axis=1, out=X[:, 1:])
        X[:, 1:] += x0
        for k in range(levels):
            stride = 2 ** (levels - 1 - k)
            Xs = X[:, ::stride]
            ts = tf[::stride]
            left = Xs[:, :-1]
            dX = np.diff(Xs, axis=1)
            dt = np.diff(ts)
            r = F(Xs[:, -1]) - F(Xs[:, 0]) - np.sum(dF(left) * dX, axis=1) \
                - 0.5 * np.sum(d2F(left) * (tc.dh(ts[:-1]) * dt), axis=1)
            sums[k] += r.sum()
            sq[k] += (r * r).sum()
    mean = sums / n_paths
    var = (sq - n_paths * mean**2) / max(n_paths - 1, 1)
    se = np.sqrt(np.clip(var, 0.0, None) / n_paths)
    grids = [grid * 2**k for k in range(levels)]
    out = {"f": f, "t": t, "grids": grids, "means": mean.tolist(), "ses": se.tolist(),
           "mean_residual": float(mean[-1]), "se": float(se[-1])}
    if levels > 1:
        mesh = t / np.array(grids, dtype=float)
        good = np.abs(mean) > 0
        out["slope"] = float(np.polyfit(np.log(mesh[good]), np.log(np.abs(mean[good])), 1)[0]) \
            if good.sum() >= 2 else float("nan")
    return out


# -- the diffusion equation ---------------------------------------------------

def gauss_hermite_expectation(f: Callable, x0, var: float, n: int = 64):
    """``E f(x0 + sqrt(var) Z)`` for ``Z ~ N(0, 1)`` by Gauss-Hermite quadrature."""
    z, w = np.polynomial.hermite_e.hermegauss(n)
    w = w / math.sqrt(2 * math.pi)
    x0 = np.asarray(x0, dtype=float)
    vals = f(x0[..., None] + math.sqrt(max(var, 0.0)) * z)
    return vals @ w


@dataclass(frozen=True)
class DiffusionSolution:
    x: np.ndarray
    t: np.ndarray
    u: np.ndarray  # final time slice

    def at(self, x) -> float:
        return float(np.interp(x, self.x, self.u))


def diffusion_solve(tc: TimeChange, f: Callable, t_end: float, x0: float = 0.0, n_x: int = 801,
                    n_t: int = 400, boundary: str = "dirichlet", half_width: float | None = None,
                    max_ratio: float = 1e8) -> DiffusionSolution:
    """Crank-Nicolson for ``du/dt = h'(t)/2 u_xx`` with ``u(0, .) = f``.

    The coefficient is evaluated at the midpoint of each step.  The domain is
    ``x0 +- 8 sqrt(h(t_end))`` unless ``half_width`` is given.  Boundary
    handling: ``"dirichlet"`` takes boundary values from the Gauss-Hermite
    law of ``x + B_{h(t)}``, ``"frozen"`` keeps ``f`` there, ``"reflecting"``
    imposes zero flux.
    """
    if n_x < 3 or n_t < 1:
        raise ValueError("need n_x >= 3 and n_t >= 1")
    if boundary not in ("dirichlet", "frozen", "reflecting"):
        raise ValueError(f"unknown boundary {boundary!r}")
    hT = float(tc.h(t_end))
    if half_width is None:
        half_width = 8 * math.sqrt(hT) if hT > 0 else 1.0
    x = np.linspace(x0 - half_width, x0 + half_width, n_x)
    dx = x[1] - x[0]
    ts = np.linspace(0.0, t_end, n_t + 1)
    u = np.asarray(f(x), dtype=float).copy()
    n = n_x
    for k in range(n_t):
        dt = ts[k + 1] - ts[k]
        a = 0.5 * float(tc.dh(0.5 * (ts[k] + ts[k + 1])))
        r = a * dt / dx**2
        if not math.isfinite(r) or r > max_ratio:
            raise FloatingPointError(f"step ratio {r:.2e} too large; refine the grids")
        if r == 0.0:
            continue
        lap = np.zeros(n)
        lap[1:-1] = u[2:] - 2 * u[1:-1] + u[:-2]
        ab = np.zeros((3, n))
        ab[0, 1:] = -r / 2
        ab[1, :] = 1 + r
        ab[2, :-1] = -r / 2
        rhs = u + 0.5 * r * lap
        if boundary == "reflecting":
            lap0 = 2 * (u[1] - u[0])
            lapn = 2 * (u[-2] - u[-1])
            rhs[0] = u[0] + 0.5 * r * lap0
            rhs[-1] = u[-1] + 0.5 * r * lapn
            ab[0, 1] = -r
            ab[2, -2] = -r
        else:
            if boundary == "dirichlet":
                var = float(tc.h(ts[k + 1]))
                lo, hi = gauss_hermite_expectation(f, np.array([x[0], x[-1]]), var)
            else:
                lo, hi = u[0], u[-1]
            ab[1, 0] = ab[1, -1] = 1.0
            ab[0, 1] = 0.0
            ab[2, -2] = 0.0
            rhs[0], rhs[-1] = lo, hi
        u = solve_banded((1, 1), ab, rhs)
        if not np.all(np.isfinite(u)):
            raise FloatingPointError("diffusion solve produced non-finite values")
    return DiffusionSolution(x, ts, u)


def pde_quadrature_maxnorm(tc: TimeChange, f: Callable, t_end: float, x0: float = 0.0,
                           core: float = 4.0, **solver) -> float:
    """Max-norm gap between the PDE and the quadrature oracle on ``x0 +- core sqrt(h)``."""
    sol = diffusion_solve(tc, f, t_end, x0, **solver)
    hT = float(tc.h(t_end))
    width = core * math.sqrt(hT) if hT > 0 else 1.0
    sel = np.abs(sol.x - x0) <= width
    oracle = gauss_hermite_expectation(f, sol.x[sel], hT)
    return float(np.max(np.abs(sol.u[sel] - oracle)))


def mc_vs_pde(tc: TimeChange, f: str | Callable, t: float, x0: float, n_paths: int = 100000,
              seed: int = 0, tol: float = 1e-2, **solver) -> dict:
    """``u(t, x0)`` by quadrature (oracle), Crank-Nicolson and Monte Carlo.

    The Monte Carlo estimate must also sit within ``4 SE`` of the oracle when
    that is wider than ``tol``.
    """
    fn = named_function(f)[0] if isinstance(f, str) else f
    hT = float(tc.h(t))
    u_quad = float(gauss_hermite_expectation(fn, x0, hT))
    sol = diffusion_solve(tc, fn, t, x0, **solver)
    u_pde = sol.at(x0)
    X = x0 + math.sqrt(hT) * _rng.standard_normal(seed, _rng.TIMECHANGE, [0], n_paths)[:, 0]
    vals = fn(X)
    u_mc = float(vals.mean())
    se = float(vals.std(ddof=1) / math.sqrt(n_paths))
    mc_tol = max(tol, 4 * se)
    return {"u_pde": u_pde, "u_quadrature": u_quad, "u_mc": u_mc, "se": se,
            "tolerances": {"pde": tol, "mc": mc_tol},
            "passed": abs(u_pde - u_quad) <= tol and abs(u_mc - u_quad) <= mc_tol
            and abs(u_mc - u_pde) <= tol + mc_tol}
