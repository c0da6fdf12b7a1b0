"""
Measures on an interval or a finite set, regions, and partitions.

Regions are finite unions of half-open intervals ``[a, b)`` (so that disjoint
pieces never share an endpoint and finite additivity is exact) or finite sets
of atoms.  Three measure families are provided:

* :class:`DensityMeasure` -- ``w(x) dx`` on an interval, with
  :class:`LebesgueMeasure` as the ``w = 1`` special case,
* :class:`AtomicMeasure` -- finitely many point masses (a truncated Dirac comb
  is one instance),
* :class:`CantorMeasure` -- the middle-third Cantor measure, evaluated by
  exact triadic recursion.

Endpoints may be floats or :class:`fractions.Fraction`; the Cantor measure
uses rational arithmetic internally so triadic endpoints are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import integrate

QUAD_TOL = 1e-10
BISECT_TOL = 1e-12


class MeasureDomainError(ValueError):
    """Region outside the ambient domain, or a mass that is not finite."""


def _lt(a, b):
    return a < b


@dataclass(frozen=True)
class Region:
    """A finite union of half-open intervals, or a finite set of atoms.

    Use the constructors :meth:`interval`, :meth:`from_intervals` and
    :meth:`from_atoms` rather than the raw fields; they normalize the
    representation (sorted, disjoint, adjacent pieces merged).
    """

    intervals: tuple = ()
    atoms: frozenset | None = None

    @classmethod
    def interval(cls, a, b) -> "Region":
        return cls.from_intervals([(a, b)])

    @classmethod
    def from_intervals(cls, pieces: Iterable[tuple]) -> "Region":
        pieces = sorted((a, b) for a, b in pieces if _lt(a, b))
        merged: list[list] = []
        for a, b in pieces:
            if merged and a <= merged[-1][1]:
                if b > merged[-1][1]:
                    merged[-1][1] = b
            else:
                merged.append([a, b])
        return cls(intervals=tuple((a, b) for a, b in merged))

    @classmethod
    def from_atoms(cls, atoms: Iterable) -> "Region":
        return cls(atoms=frozenset(atoms))

    @classmethod
    def empty(cls) -> "Region":
        return cls()

    @property
    def is_atomic(self) -> bool:
        return self.atoms is not None

    def is_empty(self) -> bool:
        return not self.atoms if self.is_atomic else not self.intervals

    @property
    def bounds(self) -> tuple:
        if self.is_atomic:
            pts = sorted(self.atoms)
            return (pts[0], pts[-1]) if pts else (0, 0)
        if not self.intervals:
            return (0, 0)
        return (self.intervals[0][0], self.intervals[-1][1])

    def length(self) -> float:
        """Lebesgue length (zero for atom sets)."""
        if self.is_atomic:
            return 0.0
        return float(sum(b - a for a, b in self.intervals))

    def contains(self, x) -> bool:
        if self.is_atomic:
            return x in self.atoms
        return any(a <= x < b for a, b in self.intervals)

    def __and__(self, other: "Region") -> "Region":
        return self.intersect(other)

    def __or__(self, other: "Region") -> "Region":
        return self.union(other)

    def intersect(self, other: "Region") -> "Region":
        if self.is_atomic and other.is_atomic:
            return Region.from_atoms(self.atoms & other.atoms)
        if self.is_atomic:
            return Region.from_atoms(x for x in self.atoms if other.contains(x))
        if other.is_atomic:
            return Region.from_atoms(x for x in other.atoms if self.contains(x))
        out = []
        i = j = 0
        A, B = self.intervals, other.intervals
        while i < len(A) and j < len(B):
            lo = max(A[i][0], B[j][0])
            hi = min(A[i][1], B[j][1])
            if lo < hi:
                out.append((lo, hi))
            if A[i][1] <= B[j][1]:
                i += 1
            else:
                j += 1
        return Region(intervals=tuple(out))

    def union(self, other: "Region") -> "Region":
        if self.is_empty():
            return other
        if other.is_empty():
            return self
        if self.is_atomic != other.is_atomic:
            raise TypeError("cannot unite an atom set with an interval union")
        if self.is_atomic:
            return Region.from_atoms(self.atoms | other.atoms)
        return Region.from_intervals(self.intervals + other.intervals)

    def difference(self, other: "Region") -> "Region":
        if self.is_atomic:
            return Region.from_atoms(x for x in self.atoms if not other.contains(x))
        if other.is_atomic:
            return self
        out = []
        for a, b in self.intervals:
            cur = a
            for c, d in other.intervals:
                if d <= cur or c >= b:
                    continue
                if c > cur:
                    out.append((cur, c))
                cur = max(cur, d)
                if cur >= b:
                    break
            if cur < b:
                out.append((cur, b))
        return Region.from_intervals(out)

    def isdisjoint(self, other: "Region") -> bool:
        return self.intersect(other).is_empty()

    def __str__(self) -> str:
        if self.is_atomic:
            return "{" + ",".join(str(x) for x in sorted(self.atoms)) + "}"
        if not self.intervals:
            return "{}"
        return "U".join(f"[{_fmt(a)},{_fmt(b)})" for a, b in self.intervals)


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)
    return repr(float(x)) if not isinstance(x, int) else str(x)


class Measure:
    """Common interface: ``measure(region)``, ``cumulative(x)``, ``domain``."""

    kind = "abstract"
    domain: tuple = (-math.inf, math.inf)

    def measure(self, region: Region) -> float:
        if region.is_atomic:
            return self._atom_mass(region.atoms)
        self._check_inside(region)
        return float(sum(self._interval_mass(a, b) for a, b in region.intervals))

    def __call__(self, region: Region) -> float:
        return self.measure(region)

    def intersection_measure(self, a: Region, b: Region) -> float:
        return self.measure(a.intersect(b))

    def cumulative(self, x) -> float:
        """``mu([lo, x])`` where ``lo`` is the left end of the domain."""
        raise NotImplementedError

    def density_at(self, x):
        raise MeasureDomainError(f"{self.kind} measure has no Lebesgue density")

    def _check_inside(self, region: Region):
        lo, hi = self.domain
        for a, b in region.intervals:
            if a < lo or b > hi:
                raise MeasureDomainError(
                    f"region {region} not inside domain [{lo}, {hi}]")

    def _atom_mass(self, atoms) -> float:
        return 0.0

    def _interval_mass(self, a, b) -> float:
        raise NotImplementedError


class DensityMeasure(Measure):
    """``w(x) dx`` on ``domain``.

    Parameters
    ----------
    density
        Vectorizable callable ``x -> w(x) >= 0``.
    domain
        Ambient interval ``(lo, hi)``; either end may be infinite.
    antiderivative
        Optional primitive of ``density``; used instead of quadrature when given.
    breakpoints
        Points where ``density`` is not smooth, passed to the quadrature.
    """

    kind = "density"

    def __init__(self, density: Callable, domain=(0, 1), antiderivative=None,
                 breakpoints: Sequence[float] = (), name: str | None = None):
        self.density = density
        self.domain = tuple(domain)
        self.antiderivative = antiderivative
        self.breakpoints = tuple(sorted(breakpoints))
        self.name = name or "density"

    def density_at(self, x):
        return self.density(x)

    def _interval_mass(self, a, b) -> float:
        if self.antiderivative is not None and math.isfinite(a) and math.isfinite(b):
            return float(self.antiderivative(b) - self.antiderivative(a))
        a, b = float(a), float(b)
        pts = [p for p in self.breakpoints if a < p < b]
        if math.isinf(a) or math.isinf(b):
            val, err = integrate.quad(self.density, a, b, epsabs=QUAD_TOL, epsrel=1e-12, limit=200)
        else:
            val, err = integrate.quad(self.density, a, b, epsabs=QUAD_TOL, epsrel=1e-12,
                                      limit=200, points=pts or None)
        if not math.isfinite(val) or err > 1e3 * QUAD_TOL + 1e-8 * abs(val):
            raise MeasureDomainError(
                f"density not integrable on [{a}, {b}) (estimate {val}, error {err})")
        return val

    def cumulative(self, x) -> float:
        lo = self.domain[0]
        if x <= lo:
            return 0.0
        return self._interval_mass(lo, min(x, self.domain[1]))


class LebesgueMeasure(DensityMeasure):
    """Lebesgue measure on an interval; masses are exact lengths."""

    kind = "lebesgue"

    def __init__(self, domain=(0, 1)):
        super().__init__(lambda x: np.ones_like(np.asarray(x, dtype=float)), domain,
                         antiderivative=lambda x: x, name="uniform")

    def _interval_mass(self, a, b) -> float:
        if math.isinf(a) or math.isinf(b):
            raise MeasureDomainError("unbounded region has infinite Lebesgue measure")
        return float(b - a)


class AtomicMeasure(Measure):
    """Finitely many point masses ``sum_k m_k delta_{x_k}``."""

    kind = "atomic"

    def __init__(self, locations: Sequence, masses: Sequence[float] | None = None):
        locs = list(locations)
        masses = [1.0] * len(locs) if masses is None else [float(m) for m in masses]
        if len(masses) != len(locs):
            raise ValueError("locations and masses differ in length")
        if any(m < 0 for m in masses):
            raise ValueError("atom masses must be nonnegative")
        if len(set(locs)) != len(locs):
            raise ValueError("atom locations must be distinct")
        order = sorted(range(len(locs)), key=lambda k: locs[k])
        self.locations = tuple(locs[k] for k in order)
        self.masses = tuple(masses[k] for k in order)
        self._mass_of = dict(zip(self.locations, self.masses))

    @classmethod
    def dirac_comb(cls, n_min: int, n_max: int) -> "AtomicMeasure":
        """Unit masses at the integers ``n_min..n_max`` (a truncated comb)."""
        return cls(list(range(n_min, n_max + 1)))

    def _atom_mass(self, atoms) -> float:
        return float(sum(self._mass_of.get(x, 0.0) for x in atoms))

    def _interval_mass(self, a, b) -> float:
        return float(sum(m for x, m in zip(self.locations, self.masses) if a <= x < b))

    def cumulative(self, x) -> float:
        return float(sum(m for loc, m in zip(self.locations, self.masses) if loc <= x))


class CantorMeasure(Measure):
    """Middle-third Cantor measure on ``[0, 1]``.

    The distribution function (the devil's staircase) is computed by reading
    ternary digits of the argument in exact rational arithmetic.  A digit 1
    lands in a removed gap, where the staircase is flat, and the recursion
    stops; otherwise it runs ``depth`` levels, leaving an error below
    ``2**-depth``.  Float arguments are first snapped to the nearest rational
    with denominator at most ``3**depth``, which makes float triadic points
    such as ``1/3`` exact.
    """

    kind = "cantor"
    domain = (0, 1)

    def __init__(self, depth: int = 30):
        if depth < 1:
            raise ValueError("depth must be positive")
        self.depth = int(depth)
        self._qmax = 3**self.depth

    def _as_fraction(self, x) -> Fraction:
        if isinstance(x, Fraction):
            return x
        if isinstance(x, int):
            return Fraction(x)
        return Fraction(float(x)).limit_denominator(self._qmax)

    def staircase(self, x) -> float:
        fx = self._as_fraction(x)
        p, q = fx.numerator, fx.denominator
        if p <= 0:
            return 0.0
        if p >= q:
            return 1.0
        acc = 0
        for k in range(1, self.depth + 1):
            p *= 3
            d, p = divmod(p, q)
            if d == 0:
                continue
            acc += 1 << (self.depth - k)
            if d == 1 or p == 0:
                break
        return acc / (1 << self.depth)

    def cumulative(self, x) -> float:
        return self.staircase(x)

    def _interval_mass(self, a, b) -> float:
        return self.staircase(b) - self.staircase(a)

    def _check_inside(self, region: Region):
        lo, hi = self.domain
        for a, b in region.intervals:
            if a < lo or b > hi:
                raise MeasureDomainError(f"region {region} not inside [0, 1]")


def measure_of(m: Measure, r: Region) -> float:
    return m.measure(r)


def intersection_measure(m: Measure, a: Region, b: Region) -> float:
    """``mu(a & b)``; the kernel whose Gram matrices are studied throughout."""
    return m.measure(a.intersect(b))


def cumulative(m: Measure, x) -> float:
    return m.cumulative(x)


# -- partitions ------------------------------------------------------------

@dataclass(frozen=True)
class Partition:
    """Disjoint cells whose union is ``parent``."""

    cells: tuple
    parent: Region

    def __post_init__(self):
        cells = tuple(self.cells)
        object.__setattr__(self, "cells", cells)
        for i in range(len(cells)):
            for j in range(i + 1, len(cells)):
                if not cells[i].isdisjoint(cells[j]):
                    raise ValueError(f"cells {i} and {j} overlap")
        union = Region.empty()
        for c in cells:
            union = union.union(c)
        if union != self.parent:
            raise ValueError("cells do not cover the parent region")

    @classmethod
    def uniform(cls, a, b, n: int) -> "Partition":
        """``n`` equal-length cells of ``[a, b)``."""
        if isinstance(a, (int, Fraction)) and isinstance(b, (int, Fraction)):
            edges = [Fraction(a) + Fraction(b - a) * k / n for k in range(n + 1)]
        else:
            edges = list(np.linspace(float(a), float(b), n + 1))
        cells = tuple(Region.interval(edges[k], edges[k + 1]) for k in range(n))
        return cls(cells, Region.interval(a, b))

    @classmethod
    def from_edges(cls, edges: Sequence) -> "Partition":
        cells = tuple(Region.interval(edges[k], edges[k + 1]) for k in range(len(edges) - 1))
        return cls(cells, Region.interval(edges[0], edges[-1]))

    def __len__(self) -> int:
        return len(self.cells)

    def masses(self, m: Measure) -> np.ndarray:
        return np.array([m.measure(c) for c in self.cells])

    def mesh(self, m: Measure) -> float:
        return float(max(self.masses(m))) if self.cells else 0.0


def _bisect(g, target, lo, hi):
    glo = g(lo)
    if glo >= target:
        return lo
    for _ in range(200):
        mid = (lo + hi) / 2
        gm = g(mid)
        if abs(gm - target) <= BISECT_TOL:
            return mid
        if gm < target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 4 * np.finfo(float).eps * max(1.0, abs(float(hi))):
            break
    return hi


def _split_cell(cell: Region, factor: int, m: Measure | None) -> list:
    if cell.is_atomic:
        pts = sorted(cell.atoms)
        if len(pts) <= 1:
            return [cell]
        return [Region.from_atoms(chunk.tolist()) for chunk in np.array_split(np.array(pts, dtype=object), factor)
                if len(chunk)]
    total = m.measure(cell) if m is not None else 0.0
    length = cell.length()
    if total <= 0 and length <= 0:
        return [cell]
    lo, hi = cell.bounds
    if total > 0 and not isinstance(m, LebesgueMeasure):
        def g(x):
            return m.measure(cell.intersect(Region.interval(lo, x)))
        targets = [total * k / factor for k in range(1, factor)]
    else:
        def g(x):
            return cell.intersect(Region.interval(lo, x)).length()
        targets = [length * k / factor for k in range(1, factor)]
        if len(cell.intervals) == 1:
            a, b = cell.intervals[0]
            if isinstance(a, (int, Fraction)) and isinstance(b, (int, Fraction)):
                step = Fraction(b - a) / factor
            else:
                step = (b - a) / factor
            cuts = [a + step * k for k in range(1, factor)]
            return _cells_from_cuts(cell, cuts)
    cuts = []
    left = lo
    for t in targets:
        x = _bisect(g, t, left, hi)
        cuts.append(x)
        left = x
    return _cells_from_cuts(cell, cuts)


def _cells_from_cuts(cell: Region, cuts) -> list:
    lo, hi = cell.bounds
    edges = [lo, *cuts, hi]
    out = []
    for k in range(len(edges) - 1):
        piece = cell.intersect(Region.interval(edges[k], edges[k + 1]))
        if not piece.is_empty():
            out.append(piece)
    return out


def refine(p: Partition, factor: int, measure: Measure | None = None) -> Partition:
    """Split every cell into ``factor`` pieces.

    Pieces carry equal ``measure`` when the cell has positive mass (found by
    bisection on the cumulative mass to ``1e-12``), equal length otherwise.
    Cells with neither mass nor length are kept whole.
    """
    if factor < 2:
        raise ValueError("refinement factor must be at least 2")
    cells = []
    for c in p.cells:
        cells.extend(_split_cell(c, factor, measure))
    return Partition(tuple(cells), p.parent)


def common_refinement(regions: Sequence[Region]) -> tuple[list, np.ndarray]:
    """Coarsest disjoint family generating every region in ``regions``.

    Returns ``(cells, membership)`` where ``membership[i, k]`` is true when
    cell ``k`` lies inside ``regions[i]``.
    """
    regions = list(regions)
    if all(r.is_atomic for r in regions):
        groups: dict = {}
        for pt in sorted(set().union(*(r.atoms for r in regions))):
            sig = tuple(pt in r.atoms for r in regions)
            groups.setdefault(sig, []).append(pt)
        sigs = list(groups)
        cells = [Region.from_atoms(groups[s]) for s in sigs]
    elif any(r.is_atomic for r in regions):
        raise TypeError("cannot refine a mix of atom sets and interval unions")
    else:
        edges = sorted({e for r in regions for iv in r.intervals for e in iv})
        groups = {}
        for k in range(len(edges) - 1):
            a, b = edges[k], edges[k + 1]
            sig = tuple(r.contains(a) for r in regions)
            if any(sig):
                groups.setdefault(sig, []).append((a, b))
        sigs = list(groups)
        cells = [Region.from_intervals(groups[s]) for s in sigs]
    membership = np.array(sigs, dtype=bool).T.reshape(len(regions), len(cells))
    return cells, membership


# -- configuration -----------------------------------------------------------

def _power_density(p: float):
    if p <= -1:
        raise ValueError(f"power:{p} is not integrable at 0")
    return (lambda x: np.power(np.asarray(x, dtype=float), p),
            lambda x: float(x) ** (p + 1) / (p + 1))


def table_density(points: Sequence[Sequence[float]]):
    """Piecewise-linear density through ``(x, w)`` breakpoints, zero outside.

    Returns ``(density, antiderivative, breakpoints)``.
    """
    arr = np.asarray(points, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or len(arr) < 2:
        raise ValueError("density table must be a list of at least two [x, w] pairs")
    xs, ws = arr[:, 0], arr[:, 1]
    if np.any(np.diff(xs) <= 0):
        raise ValueError("density table abscissae must be strictly increasing")
    if np.any(ws < 0):
        raise ValueError("density table weights must be nonnegative")
    cum = np.concatenate([[0.0], np.cumsum(np.diff(xs) * (ws[1:] + ws[:-1]) / 2)])

    def density(x):
        return np.interp(x, xs, ws, left=0.0, right=0.0)

    def antiderivative(x):
        x = float(x)
        if x <= xs[0]:
            return 0.0
        if x >= xs[-1]:
            return float(cum[-1])
        k = int(np.searchsorted(xs, x, side="right") - 1)
        wx = ws[k] + (ws[k + 1] - ws[k]) * (x - xs[k]) / (xs[k + 1] - xs[k])
        return float(cum[k] + (x - xs[k]) * (ws[k] + wx) / 2)

    return density, antiderivative, tuple(xs)


def measure_from_config(cfg: dict) -> Measure:
    """Build a measure from a JSON-style mapping.

    ``{"kind": "lebesgue", "domain": [0, 1]}``,
    ``{"kind": "density", "density": "power:2", "domain": [0, 1]}``,
    ``{"kind": "density", "density": {"table": [[0, 0], [1, 2]]}}``,
    ``{"kind": "atomic", "atoms": [[0, 1.0], [1, 0.5]]}`` or ``{"kind": "atomic", "comb": [-5, 5]}``,
    ``{"kind": "cantor", "depth": 30}``.
    """
    if not isinstance(cfg, dict) or "kind" not in cfg:
        raise ValueError("measure.kind: required")
    kind = cfg["kind"]
    domain = tuple(cfg.get("domain", (0, 1)))
    if len(domain) != 2 or not domain[0] < domain[1]:
        raise ValueError("measure.domain: must be [lo, hi] with lo < hi")
    if kind == "lebesgue":
        return LebesgueMeasure(domain)
    if kind == "density":
        spec = cfg.get("density", "uniform")
        if spec == "uniform":
            return LebesgueMeasure(domain)
        if isinstance(spec, str) and spec.startswith("power:"):
            try:
                p = float(spec.split(":", 1)[1])
            except ValueError as exc:
                raise ValueError(f"measure.density: bad exponent in {spec!r}") from exc
            dens, prim = _power_density(p)
            if domain[0] < 0:
                raise ValueError("measure.domain: power densities need a nonnegative domain")
            return DensityMeasure(dens, domain, antiderivative=prim, name=spec)
        if isinstance(spec, dict) and "table" in spec:
            dens, prim, pts = table_density(spec["table"])
            return DensityMeasure(dens, domain, antiderivative=prim, breakpoints=pts, name="table")
        raise ValueError(f"measure.density: unknown density {spec!r}")
    if kind == "atomic":
        if "comb" in cfg:
            lo, hi = cfg["comb"]
            return AtomicMeasure.dirac_comb(int(lo), int(hi))
        atoms = cfg.get("atoms")
        if not atoms:
            raise ValueError("measure.atoms: required for atomic measures")
        return AtomicMeasure([a[0] for a in atoms], [a[1] for a in atoms])
    if kind == "cantor":
        return CantorMeasure(int(cfg.get("depth", 30)))
    raise ValueError(f"measure.kind: unknown kind {kind!r}")
