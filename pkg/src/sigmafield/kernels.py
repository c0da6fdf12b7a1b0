"""
Positive-definite kernels on finite index families.

A kernel is evaluated on a finite list of items (regions over a measure, or
points on the line) to give a Gram matrix.  From a Gram matrix we read off
positive definiteness, RKHS norms of finite combinations, and the finite-sample
lower bound on the RKHS norm of a function known only through its values on
the items.  :class:`SignedMeasureElement` represents the RKHS of the kernel
``mu(A & B)`` concretely: its elements are the measures ``phi dmu``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import _io
from .measures import AtomicMeasure, Measure, Region

PD_TOL = 1e-10
CLIP = 1e-12


class KernelEvaluationError(RuntimeError):
    pass


class NotRepresentableError(ValueError):
    """Sample values have a component outside the column space of the Gram."""

    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class KernelSpec:
    """A symmetric kernel ``evaluator(a, b)`` on regions or on points."""

    evaluator: Callable
    index_kind: str = "points"
    name: str = "kernel"

    def __call__(self, a, b):
        return self.evaluator(a, b)


def beta_kernel(m: Measure) -> KernelSpec:
    """The kernel ``(A, B) -> m(A & B)`` on regions."""
    return KernelSpec(lambda a, b: m.measure(a.intersect(b)), "regions", f"beta[{m.kind}]")


@dataclass(frozen=True)
class GramMatrix:
    entries: np.ndarray
    items: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "entries", np.asarray(self.entries, dtype=float))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def labels(self):
        if self.items:
            return [str(it) for it in self.items]
        return [f"item{i}" for i in range(self.n)]

    def to_csv(self, path=None):
        """CSV with a header row naming the items; returns the text if no path."""
        rows = [[lab, *row] for lab, row in zip(self.labels(), self.entries)]
        header = ["item", *self.labels()]
        if path is None:
            return _io.csv_text(header, rows)
        return _io.write_csv(path, header, rows)


def _entries(g) -> np.ndarray:
    return g.entries if isinstance(g, GramMatrix) else np.asarray(g, dtype=float)


def gram(k: KernelSpec | Callable, items: Sequence) -> GramMatrix:
    """Gram matrix ``G[i, j] = k(items[i], items[j])``.

    Only the upper triangle is evaluated; the lower triangle is mirrored so the
    result is exactly symmetric.
    """
    items = list(items)
    if not items:
        raise ValueError("gram needs at least one item")
    n = len(items)
    G = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            try:
                G[i, j] = G[j, i] = float(k(items[i], items[j]))
            except Exception as exc:
                raise KernelEvaluationError(f"kernel failed on pair ({i}, {j}): {exc}") from exc
    return GramMatrix(G, tuple(items))


@dataclass(frozen=True)
class PDResult:
    is_pd: bool
    min_eigenvalue: float
    scale: float


def check_pd(g, tol: float = PD_TOL) -> PDResult:
    """Relative PD test: smallest eigenvalue ``>= -tol * max|G|``."""
    G = _entries(g)
    if not np.all(np.isfinite(G)):
        raise ValueError("Gram matrix has non-finite entries")
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise ValueError(f"Gram matrix must be square, got shape {G.shape}")
    scale = float(np.max(np.abs(G))) if G.size else 0.0
    lam = np.linalg.eigvalsh((G + G.T) / 2)
    lmin = float(lam[0])
    return PDResult(lmin >= -tol * scale, lmin, scale)


def rkhs_norm_sq(g, coeffs) -> float:
    """``a^T G a``, the squared norm of ``sum_i a_i k(x_i, .)``."""
    G = _entries(g)
    a = np.asarray(coeffs, dtype=float)
    if a.shape != (G.shape[0],):
        raise ValueError(f"coefficient length {a.shape} does not match Gram size {G.shape[0]}")
    return float(a @ G @ a)


def membership_bound(g, values, tol: float = 1e-8) -> float:
    """Smallest ``C`` with ``|sum a_i f(x_i)|^2 <= C a^T G a`` for all ``a``.

    Computed as ``v^T G^+ v`` with the pseudo-inverse built from the
    eigendecomposition, eigenvalues below ``1e-12 * max|eig|`` treated as zero.
    If ``v`` has a component in the discarded null space larger than
    ``tol * max(1, |v|)`` no finite ``C`` exists and
    :class:`NotRepresentableError` is raised with that residual.
    """
    G = _entries(g)
    v = np.asarray(values, dtype=float)
    if v.shape != (G.shape[0],):
        raise ValueError("values length does not match Gram size")
    lam, U = np.linalg.eigh((G + G.T) / 2)
    cut = CLIP * max(float(np.max(np.abs(lam))), np.finfo(float).tiny)
    keep = lam > cut
    proj = U[:, keep].T @ v
    residual = float(np.linalg.norm(v - U[:, keep] @ proj))
    if residual > tol * max(1.0, float(np.linalg.norm(v))):
        raise NotRepresentableError(
            f"not representable at this sample (residual {residual:.3e})", residual)
    return float(np.sum(proj**2 / lam[keep]))


class SignedMeasureElement:
    """The measure ``A -> int_A phi dmu`` for ``phi`` in ``L^2(mu)``.

    On an interval, ``phi`` is sampled at the midpoints of a uniform grid of
    ``grid`` cells and integrated against the exact cell masses of ``base``
    (read from its cumulative function).  Regions cutting a cell use the mass
    and midpoint of the cut piece.  On an atomic base the sums are exact.

    Parameters
    ----------
    density
        Vectorizable callable ``phi``.
    base
        The reference measure ``mu``; its domain must be bounded.
    grid
        Number of cells on the base domain.
    """

    def __init__(self, density: Callable, base: Measure, grid: int = 4096):
        self.density = density
        self.base = base
        self.grid = int(grid)
        if isinstance(base, AtomicMeasure):
            self._atoms = np.array(base.locations, dtype=float)
            self._phi = np.asarray(density(self._atoms), dtype=float) * np.ones(len(self._atoms))
            self._mass = np.array(base.masses)
            return
        lo, hi = (float(x) for x in base.domain)
        if not (np.isfinite(lo) and np.isfinite(hi)):
            raise ValueError("signed measure elements need a bounded base domain")
        self._edges = np.linspace(lo, hi, self.grid + 1)
        mids = (self._edges[:-1] + self._edges[1:]) / 2
        cum = np.array([base.cumulative(x) for x in self._edges])
        cum[0] = 0.0
        self._mass = np.diff(cum)
        self._phi = np.asarray(density(mids), dtype=float) * np.ones(self.grid)
        if not np.all(np.isfinite(self._phi)):
            raise FloatingPointError("density is not finite on the grid")

    def _piece(self, a, b) -> float:
        a, b = float(a), float(b)
        e = self._edges
        a, b = max(a, e[0]), min(b, e[-1])
        if b <= a:
            return 0.0
        i = int(np.searchsorted(e, a, side="right") - 1)
        j = int(np.searchsorted(e, b, side="left"))
        total = 0.0
        for k in (i, j - 1) if j - 1 > i else (i,):
            lo, hi = max(a, e[k]), min(b, e[k + 1])
            if hi > lo:
                mass = self.base.cumulative(hi) - self.base.cumulative(lo) \
                    if (lo, hi) != (e[k], e[k + 1]) else self._mass[k]
                total += float(self.density(np.array([(lo + hi) / 2]))[0]) * mass
        if j - 1 > i + 1:
            total += float(self._phi[i + 1:j - 1] @ self._mass[i + 1:j - 1])
        return total

    def evaluate(self, r: Region) -> float:
        """``int_r phi dmu``."""
        if hasattr(self, "_atoms"):
            if r.is_atomic:
                sel = np.array([x in r.atoms for x in self.base.locations])
            else:
                sel = np.array([r.contains(x) for x in self.base.locations])
            return float(self._phi[sel] @ self._mass[sel]) if sel.any() else 0.0
        if r.is_atomic:
            return 0.0
        return float(sum(self._piece(a, b) for a, b in r.intervals))

    def norm_sq(self) -> float:
        """``int |phi|^2 dmu``, the squared norm in the RKHS of ``mu(A & B)``."""
        return float(self._phi**2 @ self._mass)


def signed_measure_eval(e: SignedMeasureElement, r: Region) -> float:
    return e.evaluate(r)


def signed_measure_norm_sq(e: SignedMeasureElement) -> float:
    return e.norm_sq()
