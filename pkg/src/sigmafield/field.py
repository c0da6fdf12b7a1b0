"""
The Gaussian field indexed by regions of finite measure.

``X_A ~ N(0, mu(A))`` with ``E[X_A X_B] = mu(A & B)``.  Values on any finite
family of regions are sampled from the Gram matrix of ``mu(A & B)``.  Linear
functionals of the field (Ito-Wiener integrals of simple functions) are
sampled through the common refinement of their regions, where the field
values are independent.  The module also holds the Monte Carlo checks built
on the field: quadratic and cross variation, Karhunen-Loeve coordinates,
Gaussian integration by parts and the odd/even moment identities.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import integrate

from . import _io, _rng
from .kernels import beta_kernel, check_pd, gram
from .measures import LebesgueMeasure, Measure, MeasureDomainError, Region, common_refinement

MAX_IBP_DEGREE = 8
MAX_MOMENT_N = 3


class FactorizationError(np.linalg.LinAlgError):
    def __init__(self, message, min_eigenvalue):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class FactorizationWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class FieldSpec:
    measure: Measure
    seed: int = 0
    factorization: str = "cholesky"

    def __post_init__(self):
        if self.factorization not in ("cholesky", "eigen-clip"):
            raise ValueError(f"unknown factorization {self.factorization!r}")


@dataclass
class PathEnsemble:
    """Sampled values, one row per path and one column per item."""

    values: np.ndarray
    items: tuple = ()
    seed: int | None = None
    meta: dict = field(default_factory=dict)

    @property
    def n_paths(self) -> int:
        return self.values.shape[0]

    def column(self, j) -> np.ndarray:
        return self.values[:, j]

    def mean(self) -> np.ndarray:
        return self.values.mean(axis=0)

    def var(self) -> np.ndarray:
        return self.values.var(axis=0, ddof=1)

    def cov(self, i, j) -> tuple[float, float]:
        """Zero-mean covariance estimate ``mean(X_i X_j)`` and its standard error."""
        prod = self.values[:, i] * self.values[:, j]
        return float(prod.mean()), float(prod.std(ddof=1) / math.sqrt(len(prod)))

    def labels(self):
        return [str(it) for it in self.items] if self.items else \
            [f"col{j}" for j in range(self.values.shape[1])]

    def summary(self) -> dict:
        n = self.n_paths
        k = self.values.shape[1]
        cov = np.empty((k, k))
        se = np.empty((k, k))
        for i in range(k):
            for j in range(i, k):
                cov[i, j], se[i, j] = self.cov(i, j)
                cov[j, i], se[j, i] = cov[i, j], se[i, j]
        return {"items": self.labels(), "n_paths": n, "mean": self.mean(),
                "var": self.var(), "cov": cov, "se": se}

    def to_csv(self, path=None):
        header = ["path", *self.labels()]
        rows = ([str(p), *row] for p, row in enumerate(self.values))
        if path is None:
            return _io.csv_text(header, rows)
        return _io.write_csv(path, header, rows)


def factor_covariance(G, method="cholesky", tol=1e-10):
    """A matrix ``L`` with ``L @ L.T == G``.

    Cholesky is tried first (unless ``method == "eigen-clip"``).  Otherwise the
    eigendecomposition is used with negative eigenvalues set to zero, and a
    :class:`FactorizationWarning` records the clipped mass.  Eigenvalues below
    ``-tol * max|G|`` mean ``G`` is not a covariance and raise.
    """
    G = np.asarray(G, dtype=float)
    if method == "cholesky":
        try:
            return np.linalg.cholesky(G)
        except np.linalg.LinAlgError:
            pass
    lam, U = np.linalg.eigh((G + G.T) / 2)
    scale = float(np.max(np.abs(G))) if G.size else 0.0
    if lam[0] < -tol * scale:
        raise FactorizationError(
            f"covariance is not positive semidefinite (min eigenvalue {lam[0]:.3e})", float(lam[0]))
    clipped = float(-lam[lam < 0].sum())
    if method == "cholesky" or clipped > 0:
        warnings.warn(f"eigen-clip factorization used; clipped eigenvalue mass {clipped:.3e}",
                      FactorizationWarning, stacklevel=2)
    return U * np.sqrt(np.clip(lam, 0.0, None))


def _gaussian(G, seed, stream, n_paths, method="cholesky", offset=0):
    L = factor_covariance(G, method)
    Z = _rng.standard_normal(seed, stream, range(L.shape[1]), n_paths, offset)
    return Z @ L.T


def sample_field(spec: FieldSpec, items: Sequence[Region], n_paths: int) -> PathEnsemble:
    """``n_paths`` i.i.d. draws of ``(X_A)_{A in items}``."""
    if n_paths < 1:
        raise ValueError("n_paths must be positive")
    G = gram(beta_kernel(spec.measure), items).entries
    vals = _gaussian(G, spec.seed, _rng.FIELD, n_paths, spec.factorization)
    return PathEnsemble(vals, tuple(items), spec.seed, {"covariance": G})


@dataclass(frozen=True)
class SimpleFunction:
    """``sum_i a_i chi_{A_i}`` with pairwise disjoint ``A_i``."""

    coefficients: tuple
    regions: tuple

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(float(a) for a in self.coefficients))
        object.__setattr__(self, "regions", tuple(self.regions))
        if len(self.coefficients) != len(self.regions):
            raise ValueError("one coefficient per region required")
        for i in range(len(self.regions)):
            for j in range(i + 1, len(self.regions)):
                if not self.regions[i].isdisjoint(self.regions[j]):
                    raise ValueError(f"regions {i} and {j} overlap")

    @classmethod
    def indicator(cls, r: Region) -> "SimpleFunction":
        return cls((1.0,), (r,))

    def value_on(self, cell: Region) -> float:
        """Coefficient on a cell lying inside one region (or outside all)."""
        for a, r in zip(self.coefficients, self.regions):
            if not cell.isdisjoint(r):
                return a
        return 0.0

    def norm_sq(self, m: Measure) -> float:
        return float(sum(a * a * m.measure(r) for a, r in zip(self.coefficients, self.regions)))

    def inner(self, other: "SimpleFunction", m: Measure) -> float:
        """``<self, other>`` in ``L^2(m)``."""
        total = 0.0
        for a, r in zip(self.coefficients, self.regions):
            for b, s in zip(other.coefficients, other.regions):
                if a and b:
                    total += a * b * m.measure(r.intersect(s))
        return float(total)


def ito_integral(spec: FieldSpec, phi: SimpleFunction, ensemble: PathEnsemble) -> np.ndarray:
    """``X_phi = sum_i a_i X_{A_i}`` per path from an ensemble over phi's regions."""
    if tuple(ensemble.items) != tuple(phi.regions):
        raise ValueError("ensemble columns do not correspond to the regions of phi")
    return ensemble.values @ np.array(phi.coefficients)


def sample_integrals(spec: FieldSpec, funcs: Sequence[SimpleFunction], n_paths: int) -> np.ndarray:
    """Joint samples of ``(X_phi)_{phi in funcs}``, shape ``(n_paths, len(funcs))``.

    The field is drawn on the cells of the common refinement of all regions,
    where it is a vector of independent ``N(0, mu(cell))`` values, and each
    ``X_phi`` is the corresponding linear combination.
    """
    regions = [r for f in funcs for r in f.regions]
    if not regions:
        return np.zeros((n_paths, len(funcs)))
    cells, _ = common_refinement(regions)
    mass = np.array([spec.measure.measure(c) for c in cells])
    A = np.array([[f.value_on(c) for c in cells] for f in funcs])
    Z = _rng.standard_normal(spec.seed, _rng.FIELD, range(len(cells)), n_paths)
    return (Z * np.sqrt(mass)) @ A.T


# -- quadratic and cross variation -----------------------------------------

def quadratic_variation(ensemble) -> np.ndarray:
    """``sum_i X_{A_i}^2`` per path for an ensemble over partition cells."""
    vals = ensemble.values if isinstance(ensemble, PathEnsemble) else np.asarray(ensemble)
    return np.einsum("ij,ij->i", vals, vals)


def qv_cell_statistics(spec: FieldSpec, cell: Region, n_paths: int) -> dict:
    """Monte Carlo ``E|mu(A) - X_A^2|^2`` and ``E X_A^4`` against ``2 mu^2`` and ``3 mu^2``."""
    m = spec.measure.measure(cell)
    x = sample_field(spec, [cell], n_paths).values[:, 0]
    dev = (m - x**2) ** 2
    fourth = x**4
    n = len(x)
    return {"mu": m,
            "mse": float(dev.mean()), "mse_se": float(dev.std(ddof=1) / math.sqrt(n)),
            "mse_target": 2 * m * m,
            "fourth": float(fourth.mean()), "fourth_se": float(fourth.std(ddof=1) / math.sqrt(n)),
            "fourth_target": 3 * m * m}


def qv_partition_statistics(spec: FieldSpec, partition, n_paths: int) -> dict:
    """``E|mu(B) - QV|^2`` over a partition of ``B`` against ``sum 2 mu(A_i)^2``."""
    ens = sample_field(spec, partition.cells, n_paths)
    total = spec.measure.measure(partition.parent)
    dev = (total - quadratic_variation(ens)) ** 2
    target = float(2 * np.sum(partition.masses(spec.measure) ** 2))
    return {"mse": float(dev.mean()), "mse_se": float(dev.std(ddof=1) / math.sqrt(n_paths)),
            "target": target, "ratio": float(dev.mean() / target) if target else float("nan")}


def _density_wrt(m: Measure, lam: Measure):
    try:
        m.density_at(0.5 * (float(lam.domain[0]) + float(lam.domain[1])))
        lam.density_at(0.5 * (float(lam.domain[0]) + float(lam.domain[1])))
    except MeasureDomainError as exc:
        raise ValueError(f"density with respect to the reference measure unavailable: {exc}") from exc

    def ratio(x):
        d = np.asarray(lam.density_at(x), dtype=float)
        return np.where(d > 0, np.asarray(m.density_at(x), dtype=float) / np.where(d > 0, d, 1), 0.0)
    return ratio


def cross_variation_limit(mu: Measure, nu: Measure, lam: Measure, region: Region) -> float:
    """``int_region sqrt((dmu/dlam)(dnu/dlam)) dlam`` by adaptive quadrature."""
    f, g = _density_wrt(mu, lam), _density_wrt(nu, lam)
    total = 0.0
    for a, b in region.intervals:
        val, _ = integrate.quad(lambda x: math.sqrt(max(float(f(x) * g(x)), 0.0)) * float(lam.density_at(x)),
                                float(a), float(b), epsabs=1e-12, epsrel=1e-12, limit=200)
        total += val
    return total


def sample_coupled(mu: Measure, nu: Measure, lam: Measure, cells: Sequence[Region],
                   n_paths: int, seed: int, coupling: str = "common") -> tuple[PathEnsemble, PathEnsemble]:
    """Joint samples of ``X^(mu)`` and ``X^(nu)`` on disjoint cells.

    ``coupling="independent"`` draws the two fields from unrelated noise.
    ``coupling="common"`` drives both by one white noise ``W``:
    ``X^(mu)_A = int_A sqrt(dmu/dlam) dW`` and likewise for ``nu``, so the
    per-cell cross covariance is ``int_A sqrt((dmu/dlam)(dnu/dlam)) dlam``.
    """
    n = len(cells)
    a = np.array([mu.measure(c) for c in cells])
    b = np.array([nu.measure(c) for c in cells])
    Z = _rng.standard_normal(seed, _rng.COUPLED, range(2 * n), n_paths)
    Z1, Z2 = Z[:, :n], Z[:, n:]
    if coupling == "independent":
        x, y = Z1 * np.sqrt(a), Z2 * np.sqrt(b)
    elif coupling == "common":
        c = np.array([cross_variation_limit(mu, nu, lam, cell) for cell in cells])
        sa = np.sqrt(a)
        load = np.divide(c, sa, out=np.zeros(n), where=sa > 0)
        rest = np.sqrt(np.clip(b - load**2, 0.0, None))
        x, y = Z1 * sa, Z1 * load + Z2 * rest
    else:
        raise ValueError(f"unknown coupling {coupling!r}")
    return (PathEnsemble(x, tuple(cells), seed, {"coupling": coupling}),
            PathEnsemble(y, tuple(cells), seed, {"coupling": coupling}))


def cross_variation(ens_mu: PathEnsemble, ens_nu: PathEnsemble) -> dict:
    """``sum_i X^(mu)_{A_i} X^(nu)_{A_i}`` per path, with the polarization check.

    The polarization identity ``<X,Y> = (<X> + <Y> - <X - Y>) / 2`` holds per
    path as an algebraic identity of the three sums; its largest violation is
    reported as ``polarization_residual``.
    """
    x, y = ens_mu.values, ens_nu.values
    if x.shape != y.shape:
        raise ValueError("ensembles must share paths and cells")
    cv = np.einsum("ij,ij->i", x, y)
    qx, qy = quadratic_variation(x), quadratic_variation(y)
    qd = quadratic_variation(x - y)
    pol = 0.5 * (qx + qy - qd)
    scale = np.maximum(1.0, np.abs(qx) + np.abs(qy) + np.abs(qd))
    return {"cross": cv, "qv_mu": qx, "qv_nu": qy, "qv_diff": qd,
            "polarization_residual": float(np.max(np.abs(cv - pol) / scale))}


# -- Karhunen-Loeve ---------------------------------------------------------

def _haar_index(k):
    """Level and position of the k-th Haar function (k >= 1)."""
    j = int(math.floor(math.log2(k)))
    return j, k - 2**j


@dataclass(frozen=True)
class OrthonormalBasis:
    """Haar or cosine basis of ``L^2([0, 1], dx)``, truncated to ``n_terms``.

    Haar ordering: the constant, then level by level ``2^(j/2) psi(2^j x - k)``.
    Cosine: ``1, sqrt(2) cos(pi k x)``.
    """

    kind: str
    n_terms: int
    measure: Measure = field(default_factory=LebesgueMeasure)

    def __post_init__(self):
        if self.kind not in ("haar", "fourier-cosine"):
            raise ValueError(f"unknown basis kind {self.kind!r}")
        if self.n_terms < 1:
            raise ValueError("n_terms must be positive")
        if not (isinstance(self.measure, LebesgueMeasure) and tuple(self.measure.domain) == (0, 1)):
            raise ValueError("bases are implemented for Lebesgue measure on [0, 1]")

    def evaluate(self, x) -> np.ndarray:
        """Matrix ``phi_k(x_i)``, shape ``(len(x), n_terms)``."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.empty((len(x), self.n_terms))
        out[:, 0] = 1.0
        for k in range(1, self.n_terms):
            if self.kind == "haar":
                j, p = _haar_index(k)
                u = x * 2**j - p
                out[:, k] = 2 ** (j / 2) * (((u >= 0) & (u < 0.5)) * 1.0 - ((u >= 0.5) & (u < 1)) * 1.0)
            else:
                out[:, k] = math.sqrt(2) * np.cos(math.pi * k * x)
        return out

    def _interval_integrals(self, a, b) -> np.ndarray:
        a, b = float(max(a, 0)), float(min(b, 1))
        out = np.zeros(self.n_terms)
        if b <= a:
            return out
        out[0] = b - a
        for k in range(1, self.n_terms):
            if self.kind == "haar":
                j, p = _haar_index(k)
                l0, mid, r0 = p / 2**j, (p + 0.5) / 2**j, (p + 1) / 2**j
                left = max(0.0, min(b, mid) - max(a, l0))
                right = max(0.0, min(b, r0) - max(a, mid))
                out[k] = 2 ** (j / 2) * (left - right)
            else:
                out[k] = math.sqrt(2) * (math.sin(math.pi * k * b) - math.sin(math.pi * k * a)) / (math.pi * k)
        return out

    def integrals(self, r: Region) -> np.ndarray:
        """``(int_r phi_k dx)_k``."""
        if r.is_atomic:
            return np.zeros(self.n_terms)
        return sum((self._interval_integrals(a, b) for a, b in r.intervals), np.zeros(self.n_terms))

    def gram(self) -> np.ndarray:
        """Gram matrix of the basis under its measure, by exact or Gauss-Legendre quadrature."""
        if self.kind == "haar":
            level = int(math.floor(math.log2(max(self.n_terms - 1, 1)))) + 2
            n = 2**level
            x = (np.arange(n) + 0.5) / n
            V = self.evaluate(x)
            return V.T @ V / n
        nodes, weights = np.polynomial.legendre.leggauss(32)
        panels = max(64, self.n_terms)
        edges = np.linspace(0, 1, panels + 1)
        h = np.diff(edges)
        x = ((edges[:-1, None] + edges[1:, None]) / 2 + h[:, None] / 2 * nodes).ravel()
        w = (h[:, None] / 2 * weights).ravel()
        V = self.evaluate(x)
        return V.T @ (V * w[:, None])


def kl_truncated_covariance(basis: OrthonormalBasis, a: Region, b: Region) -> float:
    """``sum_{k < n_terms} int_a phi_k int_b phi_k``, a Parseval partial sum of ``mu(a & b)``."""
    return float(basis.integrals(a) @ basis.integrals(b))


def kl_sample(basis: OrthonormalBasis, regions: Sequence[Region], n_paths: int, seed: int) -> PathEnsemble:
    """``X_A = sum_k (int_A phi_k) Z_k`` with i.i.d. standard normal ``Z_k``."""
    C = np.array([basis.integrals(r) for r in regions])
    Z = _rng.standard_normal(seed, _rng.KL, range(basis.n_terms), n_paths)
    return PathEnsemble(Z @ C.T, tuple(regions), seed, {"basis": basis.kind, "n_terms": basis.n_terms})


def kl_coordinates(basis: OrthonormalBasis, spec: FieldSpec, n_paths: int, resolution: int | None = None) -> np.ndarray:
    """Recover ``Z_k = X_{phi_k}`` from field samples on a uniform cell grid.

    The field is sampled on ``resolution`` equal cells of ``[0, 1]``; each
    basis function is replaced by its cell averages.  For the Haar basis with a
    dyadic resolution at least as fine as the finest level this is exact.
    """
    if resolution is None:
        level = int(math.floor(math.log2(max(basis.n_terms - 1, 1)))) + 1
        resolution = 2**level
    edges = np.linspace(0.0, 1.0, resolution + 1)
    A = np.array([basis._interval_integrals(edges[i], edges[i + 1]) for i in range(resolution)]) * resolution
    Z = _rng.standard_normal(spec.seed, _rng.FIELD, range(resolution), n_paths)
    cells = Z * np.sqrt(np.diff(edges))
    return cells @ A


def max_cross_correlation(Z: np.ndarray) -> float:
    """Largest off-diagonal sample correlation between columns."""
    R = np.corrcoef(Z, rowvar=False)
    np.fill_diagonal(R, 0.0)
    return float(np.max(np.abs(R)))


# -- Gaussian integration by parts ----------------------------------------

class Polynomial:
    """Real polynomial in ``n_vars`` variables, ``{exponent tuple: coefficient}``."""

    def __init__(self, terms: dict, n_vars: int | None = None):
        terms = {tuple(int(e) for e in k): float(v) for k, v in terms.items() if v != 0}
        if n_vars is None:
            n_vars = max((len(k) for k in terms), default=1)
        for k in terms:
            if len(k) != n_vars or min(k, default=0) < 0:
                raise ValueError(f"bad exponent tuple {k} for {n_vars} variables")
        self.terms = terms
        self.n_vars = n_vars

    @classmethod
    def univariate(cls, coeffs: Sequence[float]) -> "Polynomial":
        """``sum_k coeffs[k] x^k``."""
        return cls({(k,): c for k, c in enumerate(coeffs)}, 1)

    @classmethod
    def from_config(cls, cfg) -> "Polynomial":
        """``[[coef, [e1, ..., en]], ...]`` or a univariate coefficient list."""
        if cfg and all(isinstance(c, (int, float)) for c in cfg):
            return cls.univariate(cfg)
        return cls({tuple(e): c for c, e in cfg})

    @property
    def degree(self) -> int:
        return max((sum(k) for k in self.terms), default=0)

    def __call__(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        out = np.zeros(X.shape[0])
        for k, c in self.terms.items():
            term = np.full(X.shape[0], c)
            for i, e in enumerate(k):
                if e:
                    term = term * X[:, i] ** e
            out += term
        return out

    def partial(self, i: int) -> "Polynomial":
        out = {}
        for k, c in self.terms.items():
            if k[i]:
                kk = list(k)
                kk[i] -= 1
                out[tuple(kk)] = out.get(tuple(kk), 0.0) + c * k[i]
        return Polynomial(out, self.n_vars)


def _mc(x):
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(len(x)))


def gaussian_ibp_check(p: Polynomial, phis: Sequence[SimpleFunction], psi: SimpleFunction,
                       spec: FieldSpec, n_paths: int, n_se: float = 4.0) -> dict:
    """``E[p(X_phi) X_psi]`` against ``sum_i E[d_i p(X_phi)] <phi_i, psi>``.

    Both sides are Monte Carlo means over the same paths.  ``passed`` uses the
    combined standard error ``sqrt(se_lhs^2 + se_rhs^2)``; the standard error
    of the paired difference is reported too.
    """
    if p.degree > MAX_IBP_DEGREE:
        raise ValueError(f"polynomial degree {p.degree} exceeds {MAX_IBP_DEGREE}")
    if p.n_vars != len(phis):
        raise ValueError("polynomial arity must equal the number of phi functions")
    S = sample_integrals(spec, [*phis, psi], n_paths)
    X, Y = S[:, :-1], S[:, -1]
    m = spec.measure
    lhs_s = p(X) * Y
    rhs_s = sum(p.partial(i)(X) * phi.inner(psi, m) for i, phi in enumerate(phis))
    rhs_s = np.broadcast_to(rhs_s, lhs_s.shape)
    lhs, se_l = _mc(lhs_s)
    rhs, se_r = _mc(np.asarray(rhs_s, dtype=float))
    _, se_d = _mc(lhs_s - rhs_s)
    se = math.hypot(se_l, se_r)
    return {"lhs": lhs, "rhs": rhs, "se_lhs": se_l, "se_rhs": se_r, "se": se,
            "se_paired": se_d, "tolerance": n_se * se, "passed": abs(lhs - rhs) <= n_se * se}


def double_factorial(n: int) -> int:
    return math.prod(range(n, 0, -2)) if n > 0 else 1


def moment_identity_check(n: int, phi: SimpleFunction, psi: SimpleFunction, spec: FieldSpec,
                          n_paths: int, parity: str = "odd") -> dict:
    """Odd: ``E[X_phi^(2n+1) X_psi] = (2n+1)!! |phi|^(2n) <phi, psi>`` (5 SE).

    Even: ``E[X_phi^(2n) X_psi] = 0`` (4 SE).
    """
    if not 0 <= n <= MAX_MOMENT_N:
        raise ValueError(f"n must lie in 0..{MAX_MOMENT_N}")
    S = sample_integrals(spec, [phi, psi], n_paths)
    x, y = S[:, 0], S[:, 1]
    m = spec.measure
    if parity == "odd":
        lhs, se = _mc(x ** (2 * n + 1) * y)
        rhs = double_factorial(2 * n + 1) * phi.norm_sq(m) ** n * phi.inner(psi, m)
        k = 5.0
    elif parity == "even":
        lhs, se = _mc(x ** (2 * n) * y)
        rhs, k = 0.0, 4.0
    else:
        raise ValueError("parity must be 'odd' or 'even'")
    return {"lhs": lhs, "rhs": float(rhs), "se": se, "tolerance": k * se,
            "passed": abs(lhs - rhs) <= k * se}


def radon_nikodym_check(graph, f, subsets: Sequence = ()) -> dict:
    """Density ``d mu_f / d mu = Delta f`` on a finite graph.

    ``mu_f(A) = <chi_A, f>_E`` is compared with ``sum_{x in A} (Delta f)(x) mu(x)``
    on every singleton and on the given subsets.
    """
    f = np.asarray(f, dtype=float)
    dens = graph.laplacian_apply(f)
    checks = [[x] for x in range(graph.n)] + [list(s) for s in subsets]
    worst = 0.0
    for s in checks:
        chi = np.zeros(graph.n)
        chi[list(s)] = 1.0
        lhs = graph.energy_inner(chi, f)
        rhs = float(np.sum(dens[list(s)] * graph.mu[list(s)]))
        worst = max(worst, abs(lhs - rhs))
    return {"density": dens, "max_diff": worst}


def covariance_check(spec: FieldSpec, a: Region, b: Region, n_paths: int, n_se: float = 4.0) -> dict:
    """Sample ``cov(X_a, X_b)`` against ``mu(a & b)``."""
    ens = sample_field(spec, [a, b], n_paths)
    est, se = ens.cov(0, 1)
    target = spec.measure.measure(a.intersect(b))
    return {"lhs": est, "rhs": target, "se": se, "tolerance": n_se * se,
            "passed": abs(est - target) <= n_se * se}


def pd_check_regions(m: Measure, regions: Sequence[Region], tol: float = 1e-10):
    return check_pd(gram(beta_kernel(m), regions), tol)
