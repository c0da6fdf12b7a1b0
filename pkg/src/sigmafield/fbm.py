"""
Fractional Brownian motion through three equivalent descriptions.

* the closed-form covariance ``(s^2H + t^2H - |s - t|^2H) / 2``,
* the spectral measure ``c_H |lambda|^(1 - 2H) d lambda`` with
  ``c_H = sin(pi H) Gamma(1 + 2H) / (2 pi)``,
* the moving-average kernel ``l_t`` with ``X_t = int l_t(x) dW_x``, split at
  ``x = 0`` into a backward part ``l_t^-`` (noise on ``x < 0``) and a forward
  part ``l_t^+`` (noise on ``[0, t]``).

Normalization of the moving-average kernel
------------------------------------------
With the prefactor ``1 / Gamma(H + 1/2)`` alone, ``int l_1^2 dx`` equals
``1 / (Gamma(2H + 1) sin(pi H))``, which is 1 only at ``H = 1/2`` (about
1.383 at ``H = 0.3`` and 0.995 at ``H = 0.7``).  :class:`FactorKernel`
therefore multiplies by ``sqrt(Gamma(2H + 1) sin(pi H))`` by default so that
``int l_s l_t dx`` is the unit-variance covariance; pass
``normalized=False`` for the bare prefactor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate
from scipy.special import gamma

from . import _rng
from .field import PathEnsemble, factor_covariance
from .kernels import GramMatrix, KernelSpec

SINGULAR = "singular"
TAIL_BUDGET = 1e-8
X_MAX_CAP = 1e15


class QuadratureError(RuntimeError):
    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


@dataclass(frozen=True)
class HurstModel:
    H: float

    def __post_init__(self):
        if not 0.0 < self.H < 1.0:
            raise ValueError(f"Hurst parameter must lie in (0, 1), got {self.H}")

    @property
    def gamma_const(self) -> float:
        return 1.0 / gamma(self.H + 0.5)

    @property
    def spectral_const(self) -> float:
        return math.sin(math.pi * self.H) * gamma(1 + 2 * self.H) / (2 * math.pi)

    @property
    def variance_correction(self) -> float:
        """``sqrt(Gamma(2H + 1) sin(pi H))``; see the module notes."""
        return math.sqrt(gamma(2 * self.H + 1) * math.sin(math.pi * self.H))

    def spectral_density(self, lam):
        """``c_H |lambda|^(1 - 2H)``."""
        lam = np.abs(np.asarray(lam, dtype=float))
        return self.spectral_const * lam ** (1 - 2 * self.H)


def _check_times(*ts):
    for t in ts:
        if np.any(np.asarray(t) < 0):
            raise ValueError("fBM times must be nonnegative")


def fbm_covariance(model: HurstModel, s, t):
    """``(s^2H + t^2H - |s - t|^2H) / 2``; broadcasts over arrays."""
    _check_times(s, t)
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    if model.H == 0.5:
        # exact s & t rather than a rounded (s + t - |s - t|) / 2
        out = np.minimum(s, t)
    else:
        h2 = 2 * model.H
        out = 0.5 * (s**h2 + t**h2 - np.abs(s - t) ** h2)
    return float(out) if out.ndim == 0 else out


def fbm_kernel(model: HurstModel) -> KernelSpec:
    return KernelSpec(lambda s, t: fbm_covariance(model, s, t), "points", f"fbm[H={model.H}]")


def _versine(u):
    return 2.0 * np.sin(0.5 * u) ** 2


def spectral_covariance(model: HurstModel, s: float, t: float, split: float = 1.0,
                        tol: float = 1e-11, return_error: bool = False):
    """Covariance from the spectral measure.

    Uses the real, even form
    ``2 c_H int_0^inf (1 - cos ls - cos lt + cos l(s - t)) l^(-1 - 2H) dl``.
    On ``[0, split]`` the bracket is written with versines
    ``v(a) + v(b) - v(a - b)``, ``v(u) = 1 - cos u``, which keeps full
    relative accuracy near the origin where it behaves like ``st l^2``.  On
    ``[split, inf)`` the constant term is integrated in closed form and each
    cosine term by the QUADPACK Fourier-integral routine (QAWF).
    """
    _check_times(s, t)
    s, t = float(s), float(t)
    if s == 0.0 or t == 0.0:
        return (0.0, 0.0) if return_error else 0.0
    p = -1.0 - 2 * model.H

    def head(lam):
        return (_versine(lam * s) + _versine(lam * t) - _versine(lam * (s - t))) * lam**p

    val, err = integrate.quad(head, 0.0, split, epsabs=tol, epsrel=tol, limit=500)
    total, total_err = val, err
    total += split ** (-2 * model.H) / (2 * model.H)
    for w, sign in ((s, -1.0), (t, -1.0), (abs(s - t), 1.0)):
        if w == 0.0:
            total += sign * split ** (-2 * model.H) / (2 * model.H)
            continue
        v, e = integrate.quad(lambda lam: (lam + split) ** p, 0.0, np.inf, weight="cos", wvar=w,
                              epsabs=tol, limlst=200)
        # shift so the Fourier routine starts at zero: cos(w(l + split)) expanded
        v2, e2 = integrate.quad(lambda lam: (lam + split) ** p, 0.0, np.inf, weight="sin", wvar=w,
                                epsabs=tol, limlst=200)
        total += sign * (math.cos(w * split) * v - math.sin(w * split) * v2)
        total_err += e + e2
    out = 2 * model.spectral_const * total
    err_out = 2 * model.spectral_const * total_err
    if not math.isfinite(out) or err_out > 1e-6 * max(1.0, abs(out)):
        raise QuadratureError(f"spectral quadrature did not converge (error {err_out:.2e})",
                              out, err_out)
    return (out, err_out) if return_error else out


def paley_wiener_norm(model: HurstModel, fhat: Callable, support=(-np.inf, np.inf),
                      breakpoints: Sequence[float] = (), tol: float = 1e-10) -> float:
    """``int |fhat(l)|^2 c_H |l|^(1 - 2H) dl``.

    ``fhat`` may be complex valued.  ``support`` bounds the integration and
    ``breakpoints`` lists discontinuities of ``fhat``.  Pieces touching the
    origin use the algebraic-weight routine (QAWS) for ``|l|^(1 - 2H)``.
    """
    lo, hi = support
    cuts = sorted({float(lo), float(hi), 0.0, *[float(b) for b in breakpoints]})
    cuts = [c for c in cuts if lo <= c <= hi]
    alpha = 1 - 2 * model.H
    total, err_total = 0.0, 0.0

    def sq(lam):
        return float(np.abs(fhat(lam)) ** 2)

    for a, b in zip(cuts[:-1], cuts[1:]):
        if math.isinf(a) or math.isinf(b):
            val, err = integrate.quad(lambda l: sq(l) * abs(l) ** alpha, a, b, epsabs=tol, limit=500)
            if not math.isfinite(val) or err > 1e-6 * max(1.0, abs(val)):
                edge = b if math.isinf(a) else a
                sign = -1.0 if math.isinf(a) else 1.0
                partial = [integrate.quad(lambda l: sq(l) * abs(l) ** alpha,
                                          *sorted((edge, edge + sign * 2.0**k)), limit=500)[0]
                           for k in range(0, 12, 2)]
                raise QuadratureError(f"weighted integral does not converge; partial sums {partial}",
                                      val, err)
        elif a == 0.0:
            val, err = integrate.quad(sq, a, b, weight="alg", wvar=(alpha, 0.0), epsabs=tol, limit=500)
        elif b == 0.0:
            val, err = integrate.quad(sq, a, b, weight="alg", wvar=(0.0, alpha), epsabs=tol, limit=500)
        else:
            val, err = integrate.quad(lambda l: sq(l) * abs(l) ** alpha, a, b, epsabs=tol, limit=500)
        total += val
        err_total += err
    return model.spectral_const * total


def translate(fhat: Callable, t: float) -> Callable:
    """Transform of ``f(. + t)``: ``exp(i l t) fhat(l)``."""
    return lambda lam: np.exp(1j * lam * t) * fhat(lam)


# -- moving-average kernel ------------------------------------------------

@dataclass(frozen=True)
class FactorKernel:
    """``l_t(x)`` with ``int l_s l_t dx = K^H(s, t)``.

    Parameters
    ----------
    model
        Hurst model.
    x_max
        Truncation of the backward half-line ``(-x_max, 0]``; ``None`` means
        no truncation in quadrature and an automatic choice in simulation.
    normalized
        Include the unit-variance correction (see module notes).
    """

    model: HurstModel
    x_max: float | None = None
    normalized: bool = True

    @property
    def scale(self) -> float:
        c = self.model.gamma_const
        return c * self.model.variance_correction if self.normalized else c

    @property
    def a(self) -> float:
        return self.model.H - 0.5

    def parts(self, t, x):
        """``(l_t^-(x), l_t^+(x))`` as arrays; ``inf`` at the singular point."""
        _check_times(t)
        t = float(t)
        x = np.asarray(x, dtype=float)
        a = self.a
        with np.errstate(divide="ignore", invalid="ignore"):
            y = np.where(x < 0, -x, 1.0)
            minus = np.where(x < 0, y**a * np.expm1(a * np.log1p(t / y)), 0.0)
            u = np.where((x >= 0) & (x <= t), t - x, 1.0)
            plus = np.where((x >= 0) & (x <= t), u**a, 0.0)
            plus = np.where((x >= 0) & (x == t) & (a < 0), np.inf, plus)
        return self.scale * minus, self.scale * plus

    def values(self, t, x):
        m, p = self.parts(t, x)
        return m + p


def factor_kernel_eval(fk: FactorKernel, t: float, x: float, part: str = "both"):
    """``l_t(x)``, or one of its parts with ``part="minus"``/``"plus"``.

    Returns :data:`SINGULAR` at ``x = t`` when ``H < 1/2``.
    """
    m, p = fk.parts(t, np.array([float(x)]))
    val = {"both": m + p, "minus": m, "plus": p}[part][0]
    if math.isinf(val):
        return SINGULAR
    return float(val)


def _minus_product_integral(a, s, t, upper=np.inf):
    """``int_0^upper ((s+y)^a - y^a)((t+y)^a - y^a) dy``."""
    def d(y, w):
        return y**a * np.expm1(a * np.log1p(w / y))

    def f(y):
        return d(y, s) * d(y, t) if y > 0 else (s**a - 0.0) * (t**a - 0.0) if a > 0 else 0.0

    mid = min(1.0, upper)
    if a < 0:
        # leading behaviour y^(2a) at the origin; weight it out
        g = lambda y: d(y, s) * d(y, t) / y ** (2 * a) if y > 0 else 1.0
        v1, e1 = integrate.quad(g, 0.0, mid, weight="alg", wvar=(2 * a, 0.0), epsabs=1e-13, limit=500)
    else:
        v1, e1 = integrate.quad(f, 0.0, mid, epsabs=1e-13, epsrel=1e-12, limit=500)
    v2 = e2 = 0.0
    if upper > 1.0:
        v2, e2 = integrate.quad(f, 1.0, upper, epsabs=1e-13, epsrel=1e-12, limit=500)
    return v1 + v2, e1 + e2


def _plus_product_integral(a, s, t):
    """``int_0^min(s,t) (s-x)^a (t-x)^a dx``."""
    s, t = min(s, t), max(s, t)
    if s == 0.0:
        return 0.0, 0.0
    if s == t:
        return s ** (2 * a + 1) / (2 * a + 1), 0.0
    return integrate.quad(lambda x: (t - x) ** a, 0.0, s, weight="alg", wvar=(0.0, a),
                          epsabs=1e-13, epsrel=1e-12, limit=500)


def tail_estimate(model: HurstModel, s, t, x_max) -> float:
    """Neglected ``int_{x_max}^inf l_s^- l_t^- dy`` from ``l_t^-(-y) ~ a t y^(a - 1)``."""
    a = model.H - 0.5
    return a * a * s * t * x_max ** (2 * a - 1) / (1 - 2 * a)


def factorization_gram(fk: FactorKernel, times: Sequence[float], part: str = "both",
                       return_errors: bool = False):
    """Gram matrix ``int l_{t_i} l_{t_j} dx`` by singularity-aware quadrature.

    With a finite ``fk.x_max`` the backward integral stops there; if the tail
    estimate exceeds ``1e-8`` the cut is doubled up to a cap.
    """
    times = [float(t) for t in times]
    if not times:
        raise ValueError("times must be nonempty")
    _check_times(times)
    a = fk.a
    n = len(times)
    G = np.zeros((n, n))
    E = np.zeros((n, n))
    tmax = max(times)
    upper = np.inf
    if fk.x_max is not None:
        upper = float(fk.x_max)
        while a != 0 and tail_estimate(fk.model, tmax, tmax, upper) > TAIL_BUDGET:
            upper *= 2
            if upper > X_MAX_CAP:
                raise QuadratureError("backward tail exceeds budget at the truncation cap")
    c2 = fk.scale**2
    for i in range(n):
        for j in range(i, n):
            s, t = times[i], times[j]
            v = e = 0.0
            if part in ("both", "minus") and a != 0 and s > 0 and t > 0:
                vm, em = _minus_product_integral(a, s, t, upper)
                v, e = v + vm, e + em
                if math.isfinite(upper):
                    e += tail_estimate(fk.model, s, t, upper)
            if part in ("both", "plus"):
                vp, ep = _plus_product_integral(a, s, t)
                v, e = v + vp, e + ep
            G[i, j] = G[j, i] = c2 * v
            E[i, j] = E[j, i] = c2 * e
    g = GramMatrix(G, tuple(times))
    return (g, E) if return_errors else g


# -- simulation -----------------------------------------------------------

@dataclass(frozen=True)
class ItoGrid:
    """Cells of the truncated line and the cell averages of ``l_t``."""

    edges: np.ndarray
    weights: np.ndarray  # (n_times, n_cells): average of l_t over each cell
    n_negative: int

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    def covariance(self, part="both") -> np.ndarray:
        W = self._part(part)
        return (W * self.widths) @ W.T

    def _part(self, part):
        if part == "minus":
            W = self.weights.copy()
            W[:, self.n_negative:] = 0.0
        elif part == "plus":
            W = self.weights.copy()
            W[:, :self.n_negative] = 0.0
        else:
            W = self.weights
        return W


def _neg_primitive(a, t, y):
    """``int_y^inf``-free primitive of ``(t+y)^a - y^a`` in ``y``: ``((t+y)^(a+1) - y^(a+1))/(a+1)``."""
    b = a + 1
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(y > 0, y**b * np.expm1(b * np.log1p(t / np.where(y > 0, y, 1.0))), t**b)
    return out / b


def build_ito_grid(fk: FactorKernel, times: Sequence[float], n_positive: int = 1024,
                   ratio: float = 1.02, x_max: float | None = None) -> ItoGrid:
    """Grid for ``X_t = int l_t dW``.

    ``[0, max(times)]`` is cut into ``n_positive`` equal cells with every time
    added as an edge; ``(-x_max, 0]`` uses cells growing geometrically by
    ``ratio`` from the positive cell width.  Cell averages of ``l_t`` are
    exact, from the antiderivatives of ``(t - x)^(H - 1/2)``.
    """
    times = np.asarray(sorted(float(t) for t in times))
    _check_times(times)
    a = fk.a
    T = float(times.max())
    if T <= 0:
        raise ValueError("need a positive time")
    pos = np.union1d(np.linspace(0.0, T, n_positive + 1), times)
    dx = T / n_positive
    if x_max is None:
        x_max = fk.x_max
    if x_max is None:
        x_max = dx
        while a != 0 and tail_estimate(fk.model, T, T, x_max) > TAIL_BUDGET and x_max < X_MAX_CAP:
            x_max *= 2
    neg = [0.0]
    if a != 0:
        w = dx
        while neg[-1] < x_max:
            neg.append(neg[-1] + w)
            w *= ratio
    negative = -np.array(neg[::-1])
    edges = np.concatenate([negative, pos[1:]])
    n_neg = len(negative) - 1
    widths = np.diff(edges)
    W = np.zeros((len(times), len(widths)))
    b = a + 1
    for k, t in enumerate(times):
        if n_neg:
            y = -edges[:n_neg + 1]  # decreasing from x_max to 0
            prim = _neg_primitive(a, t, y)
            W[k, :n_neg] = (prim[:-1] - prim[1:]) / widths[:n_neg]
        lo = edges[n_neg:-1]
        hi = edges[n_neg + 1:]
        inside = hi <= t + 1e-15 * max(1.0, t)
        val = (np.clip(t - lo, 0.0, None) ** b - np.clip(t - hi, 0.0, None) ** b) / b
        W[k, n_neg:] = np.where(inside, val / widths[n_neg:], 0.0)
    return ItoGrid(edges, fk.scale * W, n_neg)


def _grid_noise(grid: ItoGrid, n_paths: int, seed: int, chunk: int = 8192):
    """Yield ``(offset, dW)`` blocks of cell increments."""
    sd = np.sqrt(grid.widths)
    cols = range(len(sd))
    for off in range(0, n_paths, chunk):
        m = min(chunk, n_paths - off)
        yield off, _rng.standard_normal(seed, _rng.FBM_GRID, cols, m, off) * sd


def simulate_fbm(model: HurstModel, times: Sequence[float], n_paths: int, method: str = "cholesky",
                 seed: int = 0, fk: FactorKernel | None = None, **grid_opts) -> PathEnsemble:
    """Sample ``(X_t)`` at ``times``.

    ``method="cholesky"`` factors the closed-form covariance;
    ``method="ito-grid"`` sums cell averages of ``l_t`` against white-noise
    increments (see :func:`build_ito_grid`).  For the grid method the exact
    covariance of the discretized field and its deviation from the closed form
    are stored in ``meta``.
    """
    times = [float(t) for t in times]
    if any(b < a for a, b in zip(times, times[1:])):
        raise ValueError("times must be sorted ascending")
    _check_times(times)
    if method == "cholesky":
        tt = np.array(times)
        G = fbm_covariance(model, tt[:, None], tt[None, :])
        vals = np.zeros((n_paths, len(times)))
        nz = tt > 0
        if nz.any():
            L = factor_covariance(G[np.ix_(nz, nz)])
            Z = _rng.standard_normal(seed, _rng.FBM_CHOL, range(int(nz.sum())), n_paths)
            vals[:, nz] = Z @ L.T
        return PathEnsemble(vals, tuple(times), seed, {"method": method, "covariance": G})
    if method != "ito-grid":
        raise ValueError(f"unknown method {method!r}")
    fk = fk or FactorKernel(model)
    uniq = sorted(set(times))
    grid = build_ito_grid(fk, uniq, **grid_opts)
    idx = [uniq.index(t) for t in times]
    Wt = grid.weights[idx]
    vals = np.empty((n_paths, len(times)))
    for off, dW in _grid_noise(grid, n_paths, seed):
        vals[off:off + len(dW)] = dW @ Wt.T
    tt = np.array(times)
    K = fbm_covariance(model, tt[:, None], tt[None, :])
    Gc = grid.covariance()[np.ix_(idx, idx)]
    return PathEnsemble(vals, tuple(times), seed,
                        {"method": method, "grid_covariance": Gc, "covariance": K,
                         "bias_bound": float(np.max(np.abs(Gc - K)))})


def filtration_split(fk: FactorKernel, times: Sequence[float], n_paths: int, seed: int,
                     **grid_opts) -> dict:
    """Backward and forward parts ``X_t^-`` and ``X_t^+`` on one noise draw.

    ``X^-`` uses only increments on ``x < 0`` and ``X^+`` only those on
    ``[0, t]``, so the two ensembles are independent and sum to the grid
    sample of ``X_t`` produced by :func:`simulate_fbm` with the same seed.
    """
    times = [float(t) for t in times]
    grid = build_ito_grid(fk, times, **grid_opts)
    Wm, Wp = grid._part("minus"), grid._part("plus")
    minus = np.empty((n_paths, len(times)))
    plus = np.empty((n_paths, len(times)))
    for off, dW in _grid_noise(grid, n_paths, seed):
        minus[off:off + len(dW)] = dW @ Wm.T
        plus[off:off + len(dW)] = dW @ Wp.T
    return {"ensemble_minus": PathEnsemble(minus, tuple(times), seed),
            "ensemble_plus": PathEnsemble(plus, tuple(times), seed),
            "grid_covariance_minus": grid.covariance("minus"),
            "grid_covariance_plus": grid.covariance("plus")}


def semimartingale_check(fk: FactorKernel, s: float, t: float, grid: int = 512,
                         max_condition: float = 1e12) -> dict:
    """Distance between ``E[X_t^+ | W on [0, s]]`` and ``X_s^+`` on a grid.

    ``[0, t]`` is cut into ``grid`` cells with ``s`` added as an edge.  The
    increments ``dW_j`` on ``[0, s]`` have diagonal covariance ``D``; the
    projection coefficients of ``X_t^+ = sum_j b_j dW_j`` are ``D^-1 k`` with
    ``k_j = cov(X_t^+, dW_j)``.  The residual is the standard deviation of
    ``projection - X_s^+``.
    """
    if not 0 < s <= t:
        raise ValueError("need 0 < s <= t")
    g = build_ito_grid(fk, [s, t], n_positive=grid, x_max=0.0) if fk.a != 0 else \
        build_ito_grid(fk, [s, t], n_positive=grid)
    n0 = g.n_negative
    widths = g.widths[n0:]
    right = g.edges[n0 + 1:]
    past = right <= s * (1 + 1e-15)
    D = np.diag(widths[past])
    cond = np.linalg.cond(D)
    if not np.isfinite(cond) or cond > max_condition:
        raise np.linalg.LinAlgError(f"increment covariance too ill-conditioned (cond {cond:.2e})")
    a_s = g.weights[0, n0:][past]
    b_t = g.weights[1, n0:]
    k = b_t[past] * widths[past]
    coef = np.linalg.solve(D, k)
    diff = coef - a_s
    residual = float(np.sqrt(diff @ D @ diff))
    return {"residual": residual, "s": s, "t": t, "grid": grid, "H": fk.model.H}
