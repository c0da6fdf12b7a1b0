"""
Catalog of numerical verifications.

Each check is a function ``(seed, quick, tol_scale) -> list[VerificationReport]``
registered under a stable name with a short anchor describing the identity
it tests.  ``quick`` shrinks Monte Carlo sizes where the tolerance is stated
in standard errors (so the verdict stays meaningful); fixed-size criteria
keep their sizes.  ``tol_scale`` multiplies every tolerance.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import fbm as F
from . import field as FD
from . import graph as GR
from . import kernels as K
from . import shannon as SH
from . import timechange as TC
from .field import PathEnsemble
from .measures import CantorMeasure, LebesgueMeasure, Partition, Region, measure_from_config, refine


@dataclass
class VerificationReport:
    """One verdict: ``passed`` iff ``|lhs - rhs| <= tolerance``."""

    name: str
    anchor: str
    lhs: float
    rhs: float
    tolerance: float
    passed: bool
    se: float | None = None
    details: dict = field(default_factory=dict)

    @classmethod
    def make(cls, name, anchor, lhs, rhs, tolerance, se=None, **details):
        lhs, rhs, tolerance = float(lhs), float(rhs), float(tolerance)
        return cls(name, anchor, lhs, rhs, tolerance, bool(abs(lhs - rhs) <= tolerance), se, details)

    def consistent(self) -> bool:
        return self.passed == (abs(self.lhs - self.rhs) <= self.tolerance)

    def as_dict(self) -> dict:
        d = asdict(self)
        if math.isinf(self.tolerance):
            d["tolerance"] = "inf"
        return d

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag} {self.name}: lhs={self.lhs:.6g} rhs={self.rhs:.6g} tol={self.tolerance:.3g}"


@dataclass(frozen=True)
class Check:
    name: str
    anchor: str
    run: Callable
    operations: tuple = ()


CATALOG: dict[str, Check] = {}


def register(name, anchor, operations=()):
    def deco(fn):
        CATALOG[name] = Check(name, anchor, fn, tuple(operations))
        return fn
    return deco


def list_checks() -> list[str]:
    return [f"{name} ({CATALOG[name].anchor})" for name in sorted(CATALOG)]


def run_checks(names=None, seed=0, quick=False, tol_scale=1.0) -> list[VerificationReport]:
    out = []
    for name in sorted(names or CATALOG):
        out.extend(CATALOG[name].run(seed, quick, tol_scale))
    return out


def _n(full, quick_n, quick):
    return quick_n if quick else full


# -- measure core and kernels ---------------------------------------------

@register("cantor-exact", "Cantor measure on triadic intervals",
          ["measure_of", "cumulative", "refine", "intersection_measure"])
def cantor_exact(seed, quick, ts):
    m = CantorMeasure(30)
    worst = 0.0
    # level-k cells of the construction carry 2^-k, removed gaps carry 0
    for k in range(1, 7):
        for j in range(3**k):
            a, b = Fraction(j, 3**k), Fraction(j + 1, 3**k)
            digits, x = [], j
            for _ in range(k):
                digits.append(x % 3)
                x //= 3
            expected = 0.0 if 1 in digits else 2.0**-k
            worst = max(worst, abs(m.measure(Region.interval(a, b)) - expected))
    split = [m.measure(c) for c in refine(Partition.uniform(0, 1, 1), 2, m).cells]
    return [VerificationReport.make("cantor-exact", CATALOG["cantor-exact"].anchor, worst, 0.0, 0.0),
            VerificationReport.make("cantor-refine", "equal-measure split of the Cantor measure",
                                    max(abs(s - 0.5) for s in split), 0.0, 1e-12 * ts)]


@register("cantor-staircase-norm", "staircase has unit Cantor density, norm^2 = 1",
          ["signed_measure_eval", "signed_measure_norm_sq"])
def cantor_norm(seed, quick, ts):
    m = CantorMeasure(30)
    e = K.SignedMeasureElement(lambda x: np.ones_like(x), m)
    reps = [VerificationReport.make("cantor-staircase-norm", CATALOG["cantor-staircase-norm"].anchor,
                                    e.norm_sq(), 1.0, 1e-6 * ts)]
    # the element reproduces the staircase: m(A) = F(b) - F(a)
    pts = [Fraction(0), Fraction(1, 9), Fraction(2, 9), Fraction(7, 27), Fraction(1, 3), Fraction(2, 3), Fraction(1)]
    worst = max(abs(e.evaluate(Region.interval(a, b)) - (m.cumulative(b) - m.cumulative(a)))
                for a, b in zip(pts[:-1], pts[1:]))
    reps.append(VerificationReport.make("cantor-staircase-measure", "m(A) = F(b) - F(a)", worst, 0.0, 1e-9 * ts))
    return reps


@register("beta-pd", "mu(A & B) is a positive definite kernel",
          ["gram", "check_pd", "rkhs_norm_sq", "membership_bound"])
def beta_pd(seed, quick, ts):
    rng = np.random.default_rng(seed)
    L = LebesgueMeasure()
    worst = 0.0
    mono = True
    for _ in range(_n(200, 20, quick)):
        ab = np.sort(rng.random((10, 2)), axis=1)
        regs = [Region.interval(a, b) for a, b in ab]
        G = K.gram(K.beta_kernel(L), regs)
        r = K.check_pd(G)
        worst = min(worst, r.min_eigenvalue / max(r.scale, 1e-300))
        # bound for phi = x on nested samples never decreases
        e = K.SignedMeasureElement(lambda x: x, L)
        vals = np.array([e.evaluate(R) for R in regs])
        b5 = K.membership_bound(G.entries[:5, :5], vals[:5], tol=1e-6)
        b10 = K.membership_bound(G.entries, vals, tol=1e-6)
        mono &= b5 <= b10 * (1 + 1e-9) + 1e-12 and b10 <= e.norm_sq() * (1 + 1e-6)
    return [VerificationReport.make("beta-pd", CATALOG["beta-pd"].anchor, min(0.0, worst), 0.0, 1e-10 * ts),
            VerificationReport.make("membership-monotone", "finite-sample bound grows with the sample "
                                    "and stays below |phi|^2", 0.0 if mono else 1.0, 0.0, 0.0)]


# -- Gaussian field -------------------------------------------------------

@register("covariance-law", "E[X_A X_B] = mu(A & B)", ["sample_field"])
def covariance_law(seed, quick, ts):
    spec = FD.FieldSpec(LebesgueMeasure(), seed)
    r = FD.covariance_check(spec, Region.interval(0, 0.5), Region.interval(0.25, 0.75), 200_000, 4 * ts)
    return [VerificationReport.make("covariance-law", CATALOG["covariance-law"].anchor,
                                    r["lhs"], r["rhs"], r["tolerance"], r["se"], n_paths=200_000)]


@register("ito-isometry", "E[X_phi^2] = |phi|^2 in L^2(mu)", ["ito_integral"])
def ito_isometry(seed, quick, ts):
    spec = FD.FieldSpec(LebesgueMeasure(), seed)
    regs = (Region.interval(0, 0.5), Region.interval(0.5, 1))
    phi = FD.SimpleFunction((1.0, 1.0), regs)
    n = _n(100_000, 20_000, quick)
    ens = FD.sample_field(spec, list(regs), n)
    x = FD.ito_integral(spec, phi, ens)
    sq = x * x
    se = float(sq.std(ddof=1) / math.sqrt(n))
    return [VerificationReport.make("ito-isometry", CATALOG["ito-isometry"].anchor, sq.mean(),
                                    phi.norm_sq(spec.measure), 5 * se * ts, se)]


@register("qv-cell-identity", "cell identity E|mu(A) - X_A^2|^2 = 2 mu(A)^2, E X_A^4 = 3 mu(A)^2",
          ["quadratic_variation"])
def qv_cell(seed, quick, ts):
    spec = FD.FieldSpec(LebesgueMeasure(), seed)
    c = FD.qv_cell_statistics(spec, Region.interval(0, 0.5), 100_000)
    p = FD.qv_partition_statistics(FD.FieldSpec(LebesgueMeasure(), seed + 1), Partition.uniform(0, 1, 100), 50_000)
    a = CATALOG["qv-cell-identity"].anchor
    return [VerificationReport.make("qv-cell-identity", a, c["mse"] / c["mse_target"], 1.0, 0.2 * ts),
            VerificationReport.make("qv-fourth-moment", a, c["fourth"] / c["fourth_target"], 1.0, 0.1 * ts),
            VerificationReport.make("qv-partition", "E|mu(B) - QV|^2 = sum 2 mu(A_i)^2", p["ratio"], 1.0, 0.2 * ts)]


@register("kl-parseval", "Karhunen-Loeve partial sums reproduce mu(A & B)", ["kl_sample"])
def kl_parseval(seed, quick, ts):
    A, B = Region.interval(0, 0.5), Region.interval(0.25, 0.75)
    b = FD.OrthonormalBasis("haar", 256)
    reps = [VerificationReport.make("kl-parseval", CATALOG["kl-parseval"].anchor,
                                    FD.kl_truncated_covariance(b, A, B), 0.25, 1e-2 * ts)]
    C = Region.interval(0.1, 0.7)
    sums = [FD.kl_truncated_covariance(FD.OrthonormalBasis(kind, n), C, C)
            for kind in ("haar", "fourier-cosine") for n in (64, 256, 1024)]
    mono = all(x <= y + 1e-15 for x, y in zip(sums[:3], sums[1:3])) and \
        all(x <= y + 1e-15 for x, y in zip(sums[3:], sums[4:]))
    reps.append(VerificationReport.make("kl-parseval-monotone", "partial sums increase to mu(A)",
                                        0.0 if mono else 1.0, 0.0, 0.0, sums=sums))
    reps.append(VerificationReport.make("kl-basis-orthonormal", "basis Gram is the identity",
                                        max(np.abs(FD.OrthonormalBasis(k, 64).gram() - np.eye(64)).max()
                                            for k in ("haar", "fourier-cosine")), 0.0, 1e-8 * ts))
    # the correlation bound is stated at 1e5 samples, so quick mode keeps that size
    n = 100_000
    Z = FD.kl_coordinates(FD.OrthonormalBasis("haar", 64), FD.FieldSpec(LebesgueMeasure(), seed), n)
    ens = FD.kl_sample(b, [A, B], _n(100_000, 20_000, quick), seed)
    cov, se = ens.cov(0, 1)
    reps.append(VerificationReport.make("kl-coordinates", "recovered Z_k are uncorrelated",
                                        FD.max_cross_correlation(Z), 0.0, 0.02 * ts, n_samples=n))
    reps.append(VerificationReport.make("kl-sample", "KL samples carry covariance mu(A & B)",
                                        cov, FD.kl_truncated_covariance(b, A, B), 4 * se * ts, se))
    return reps


def _moment_functions():
    phi = FD.SimpleFunction((1.0, -0.5), (Region.interval(0, 0.4), Region.interval(0.4, 1)))
    psi = FD.SimpleFunction((0.8, 1.2), (Region.interval(0.2, 0.6), Region.interval(0.6, 0.9)))
    return phi, psi


@register("moment-identities", "E[X_phi^(2n+1) X_psi] = (2n+1)!! |phi|^2n <phi,psi>, even moments vanish",
          ["moment_identity_check"])
def moments(seed, quick, ts):
    spec = FD.FieldSpec(LebesgueMeasure(), seed)
    phi, psi = _moment_functions()
    n_paths = _n(200_000, 40_000, quick)
    reps = []
    for n in (0, 1, 2):
        for parity, k in (("odd", 5), ("even", 4)):
            r = FD.moment_identity_check(n, phi, psi, spec, n_paths, parity)
            reps.append(VerificationReport.make(f"moment-{parity}-n{n}", CATALOG["moment-identities"].anchor,
                                                r["lhs"], r["rhs"], k * r["se"] * ts, r["se"]))
    return reps


@register("gaussian-ibp", "E[F X_psi] = sum E[d_i p] <phi_i, psi>", ["gaussian_ibp_check"])
def ibp(seed, quick, ts):
    spec = FD.FieldSpec(LebesgueMeasure(), seed)
    phi, psi = _moment_functions()
    phi2 = FD.SimpleFunction((2.0,), (Region.interval(0.5, 0.8),))
    n_paths = _n(200_000, 40_000, quick)
    reps = []
    polys = {"quadratic": FD.Polynomial({(2, 0): 1.0, (1, 1): 0.5, (0, 1): 1.0}),
             "cubic": FD.Polynomial({(3, 0): 1.0, (1, 2): -0.7, (1, 0): 0.3})}
    for label, p in polys.items():
        r = FD.gaussian_ibp_check(p, [phi, phi2], psi, spec, n_paths, 4 * ts)
        reps.append(VerificationReport.make(f"gaussian-ibp-{label}", CATALOG["gaussian-ibp"].anchor,
                                            r["lhs"], r["rhs"], r["tolerance"], r["se"]))
    return reps


@register("cross-variation", "cross variation tends to int sqrt(dmu/dl dnu/dl) dl",
          ["cross_variation"])
def cross(seed, quick, ts):
    L = LebesgueMeasure()
    mu = measure_from_config({"kind": "density", "density": {"table": [[0, 0], [1, 2]]}})
    nu = measure_from_config({"kind": "density", "density": {"table": [[0, 2], [1, 0]]}})
    cells = Partition.uniform(0.0, 1.0, 200).cells
    n = _n(20_000, 4_000, quick)
    X, Y = FD.sample_coupled(mu, nu, L, cells, n, seed, "common")
    cv = FD.cross_variation(X, Y)
    limit = FD.cross_variation_limit(mu, nu, L, Region.interval(0, 1))
    se = float(cv["cross"].std(ddof=1) / math.sqrt(n))
    Xi, Yi = FD.sample_coupled(mu, nu, L, cells, n, seed, "independent")
    cvi = FD.cross_variation(Xi, Yi)
    sei = float(cvi["cross"].std(ddof=1) / math.sqrt(n))
    return [VerificationReport.make("cross-variation-limit", CATALOG["cross-variation"].anchor,
                                    cv["cross"].mean(), limit, 4 * se * ts, se, oracle=math.pi / 4),
            VerificationReport.make("cross-variation-oracle", "int 2 sqrt(x(1-x)) dx = pi/4",
                                    limit, math.pi / 4, 1e-9 * ts),
            VerificationReport.make("cross-variation-independent", "independent coupling has mean 0",
                                    cvi["cross"].mean(), 0.0, 4 * sei * ts, sei),
            VerificationReport.make("polarization", "<X,Y> = (<X> + <Y> - <X-Y>)/2 per path",
                                    cv["polarization_residual"], 0.0, 1e-12 * ts)]


@register("radon-nikodym", "d mu_f / d mu = Delta f on a finite graph", ["radon_nikodym_check"])
def radon(seed, quick, ts):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(_n(100, 20, quick)):
        g = GR.WeightedGraph.random(int(rng.integers(3, 20)), rng)
        subsets = [list(np.flatnonzero(rng.random(g.n) < 0.5)) for _ in range(3)]
        r = FD.radon_nikodym_check(g, rng.normal(size=g.n), subsets)
        worst = max(worst, r["max_diff"] / (g.scale * g.n))
    path = GR.WeightedGraph.from_edges([1, 1, 1], [[0, 1, 1], [1, 2, 1]])
    d = FD.radon_nikodym_check(path, [0, 1, 0])["density"]
    return [VerificationReport.make("radon-nikodym", CATALOG["radon-nikodym"].anchor, worst, 0.0, 1e-12 * ts),
            VerificationReport.make("radon-nikodym-path", "path graph density (-1, 2, -1)",
                                    float(np.max(np.abs(d - [-1, 2, -1]))), 0.0, 0.0)]


@register("same-seed-reproducibility", "identical inputs give identical ensembles", ["sample_field"])
def reproducible(seed, quick, ts):
    spec = FD.FieldSpec(LebesgueMeasure(), seed)
    regs = [Region.interval(0, 0.3), Region.interval(0.2, 0.9)]
    a = FD.sample_field(spec, regs, 1000).to_csv()
    b = FD.sample_field(spec, regs, 1000).to_csv()
    return [VerificationReport.make("same-seed-reproducibility", CATALOG["same-seed-reproducibility"].anchor,
                                    0.0 if a == b else 1.0, 0.0, 0.0)]


# -- fBM ------------------------------------------------------------------

FBM_GRID = tuple(np.linspace(2 / 6, 2, 6))


@register("fbm-triangle", "closed form, spectral integral and moving-average Gram agree",
          ["fbm_covariance", "spectral_covariance", "factorization_gram"])
def fbm_triangle(seed, quick, ts):
    reps = []
    t = np.array(FBM_GRID)
    for H in (0.3, 0.5, 0.7):
        m = F.HurstModel(H)
        Kc = F.fbm_covariance(m, t[:, None], t[None, :])
        S = np.array([[F.spectral_covariance(m, a, b) for b in t] for a in t])
        G = F.factorization_gram(F.FactorKernel(m), t).entries
        for label, A, B in (("closed-spectral", Kc, S), ("closed-factor", Kc, G), ("spectral-factor", S, G)):
            rel = float(np.max(np.abs(A - B) / np.abs(A)))
            reps.append(VerificationReport.make(f"fbm-triangle-H{H}-{label}", CATALOG["fbm-triangle"].anchor,
                                                rel, 0.0, 1e-3 * ts))
    return reps


@register("hurst-half-degeneracy", "H = 1/2 reduces to Brownian motion; time change differs for H != 1/2",
          ["factor_kernel_eval", "fbm_covariance", "tc_covariance"])
def hurst_half(seed, quick, ts):
    m = F.HurstModel(0.5)
    fk = F.FactorKernel(m)
    reps = []
    worst = 0.0
    for t in (0.5, 1.0, 2.0):
        x = np.linspace(-3, 3, 601)
        worst = max(worst, float(np.max(np.abs(fk.values(t, x) - ((x >= 0) & (x <= t))))))
    reps.append(VerificationReport.make("hurst-half-factor-kernel", CATALOG["hurst-half-degeneracy"].anchor,
                                        worst, 0.0, 1e-12 * ts))
    rng = np.random.default_rng(seed)
    s, t = rng.random(1000) * 3, rng.random(1000) * 3
    reps.append(VerificationReport.make("hurst-half-covariance", "covariance equals s & t exactly",
                                        float(np.max(np.abs(F.fbm_covariance(m, s, t) - np.minimum(s, t)))), 0.0, 0.0))
    grid = np.linspace(0, 2, 21)
    S, T = np.meshgrid(grid, grid)
    for H in (0.5, 0.7):
        tc = TC.TimeChange.named(f"power:{2 * H}")
        gap = float(np.max(np.abs(TC.tc_covariance(tc, S, T) - F.fbm_covariance(F.HurstModel(H), S, T))))
        if H == 0.5:
            reps.append(VerificationReport.make("fbm-vs-timechange-H0.5", "kernels coincide at H = 1/2",
                                                gap, 0.0, 0.0))
        else:
            # informational lower bound: passes when the gap exceeds 0.01
            reps.append(VerificationReport.make("fbm-vs-timechange-H0.7", "kernels differ for H != 1/2",
                                                min(gap, 0.01), 0.01, 0.0, gap=gap))
    return reps


@register("fbm-simulation", "simulated fBM covariance matches the closed form",
          ["simulate_fbm", "filtration_split"])
def fbm_sim(seed, quick, ts):
    m = F.HurstModel(0.7)
    times = list(np.linspace(0.25, 2, 8))
    n = _n(200_000, 40_000, quick)
    e = F.simulate_fbm(m, times, n, "cholesky", seed)
    Kc = e.meta["covariance"]
    z = max(abs(e.cov(i, j)[0] - Kc[i, j]) / e.cov(i, j)[1] for i in range(8) for j in range(i, 8))
    reps = [VerificationReport.make("fbm-cholesky", CATALOG["fbm-simulation"].anchor, z, 0.0, 5 * ts)]
    ng = _n(20_000, 5_000, quick)
    g = F.simulate_fbm(m, [1.0, 2.0], ng, "ito-grid", seed)
    K2 = g.meta["covariance"]
    z2 = max((abs(g.cov(i, j)[0] - K2[i, j]) - g.meta["bias_bound"]) / g.cov(i, j)[1]
             for i in range(2) for j in range(i, 2))
    reps.append(VerificationReport.make("fbm-ito-grid", "grid representation within bias + 5 SE",
                                        max(z2, 0.0), 0.0, 5 * ts, bias_bound=g.meta["bias_bound"]))
    split = F.filtration_split(F.FactorKernel(m), [1.0, 2.0], ng, seed)
    xm, xp = split["ensemble_minus"].values, split["ensemble_plus"].values
    prod = xm[:, 0] * xp[:, 1]
    se = float(prod.std(ddof=1) / math.sqrt(ng))
    reps.append(VerificationReport.make("filtration-independence", "backward and forward parts uncorrelated",
                                        prod.mean(), 0.0, 4 * se * ts, se))
    fk = F.FactorKernel(m)
    add = F.factorization_gram(fk, [1.0, 2.0], "minus").entries + F.factorization_gram(fk, [1.0, 2.0], "plus").entries
    reps.append(VerificationReport.make("filtration-additivity", "E X_s X_t = E X-_s X-_t + E X+_s X+_t",
                                        add[0, 1], F.fbm_covariance(m, 1.0, 2.0), 1e-8 * ts))
    return reps


@register("semimartingale-probe", "projection of X+_t on the past of [0, s] versus X+_s",
          ["semimartingale_check"])
def semimart(seed, quick, ts):
    reps = []
    for H in (0.5, 0.7):
        r = F.semimartingale_check(F.FactorKernel(F.HurstModel(H)), 1.0, 2.0, 512)
        if H == 0.5:
            reps.append(VerificationReport.make("semimartingale-H0.5", CATALOG["semimartingale-probe"].anchor,
                                                r["residual"], 0.0, 1e-8 * ts))
        else:
            reps.append(VerificationReport.make("semimartingale-H0.7", "residual reported, not asserted",
                                                r["residual"], 0.0, math.inf))
    return reps


@register("paley-wiener", "|f-hat|^2 integrated against the spectral measure", ["paley_wiener_norm"])
def pw(seed, quick, ts):
    m = F.HurstModel(0.7)
    box = lambda lam: 1.0  # noqa: E731
    v = F.paley_wiener_norm(m, box, support=(-1, 1))
    g = lambda lam: np.exp(-lam * lam)  # noqa: E731
    return [VerificationReport.make("paley-wiener-box", CATALOG["paley-wiener"].anchor,
                                    v, m.spectral_const * 2 / 0.6, 1e-10 * ts),
            VerificationReport.make("paley-wiener-translation", "norm invariant under translation",
                                    F.paley_wiener_norm(m, F.translate(g, 2.5)), F.paley_wiener_norm(m, g), 1e-9 * ts)]


# -- time change ----------------------------------------------------------

@register("pde-mc-quadrature", "u(t,x) = E f(x + B_h(t)) by PDE, quadrature and Monte Carlo",
          ["diffusion_solve", "mc_vs_pde", "simulate_tc", "tc_covariance"])
def pde_mc(seed, quick, ts):
    reps = []
    bump = TC.named_function("exp-bump")[0]
    for h in ("linear", "power:2"):
        tc = TC.TimeChange.named(h)
        gap = TC.pde_quadrature_maxnorm(tc, bump, 1.0)
        reps.append(VerificationReport.make(f"pde-quadrature-{h}", CATALOG["pde-mc-quadrature"].anchor,
                                            gap, 0.0, 1e-2 * ts))
        for x0 in (0.0, 0.7):
            r = TC.mc_vs_pde(tc, "exp-bump", 1.0, x0, _n(200_000, 50_000, quick), seed)
            reps.append(VerificationReport.make(f"mc-quadrature-{h}-x{x0}", "Monte Carlo against quadrature",
                                                r["u_mc"], r["u_quadrature"], r["tolerances"]["mc"] * ts, r["se"]))
            reps.append(VerificationReport.make(f"pde-mc-{h}-x{x0}", "PDE against Monte Carlo",
                                                r["u_pde"], r["u_mc"], (r["tolerances"]["pde"] + r["tolerances"]["mc"]) * ts))
        e = TC.simulate_tc(tc, [1.0, 2.0], _n(200_000, 50_000, quick), seed)
        c, se = e.cov(0, 1)
        reps.append(VerificationReport.make(f"tc-covariance-{h}", "sample covariance h(s & t)",
                                            c, TC.tc_covariance(tc, 1.0, 2.0), 4 * se * ts, se))
    return reps


@register("ito-formula-residual", "discrete Ito formula for B_h(t): residual -> 0 with the mesh",
          ["ito_formula_residual", "tc_quadratic_variation"])
def ito_res(seed, quick, ts):
    tc = TC.TimeChange.named("power:2")
    fine = TC.ito_formula_residual(tc, "square", 1.0, _n(8192, 2048, quick), _n(10_000, 4_000, quick), seed)
    ref = TC.ito_formula_residual(tc, "exp-bump", 1.0, 16, _n(100_000, 20_000, quick), seed, levels=5)
    means = np.abs(ref["means"])
    shrink = bool(np.all(means[1:] < means[:-1]))
    reps = [VerificationReport.make("ito-formula-residual", CATALOG["ito-formula-residual"].anchor,
                                    fine["mean_residual"], 0.0, 4 * fine["se"] * ts, fine["se"]),
            VerificationReport.make("ito-formula-refinement-slope", "mean residual is O(mesh)",
                                    ref["slope"], 1.0, 0.5 * ts, means=ref["means"]),
            VerificationReport.make("ito-formula-shrinking", "|mean residual| decreases under 2x refinement",
                                    0.0 if shrink else 1.0, 0.0, 0.0)]
    edges = list(np.linspace(0, 1, 101))
    ens = TC.simulate_tc(tc, edges[1:], _n(20_000, 5_000, quick), seed)
    full = PathEnsemble(np.hstack([np.zeros((ens.n_paths, 1)), ens.values]), tuple(edges))
    qv = TC.tc_quadratic_variation(tc, edges, full)
    se = float(qv.std(ddof=1) / math.sqrt(len(qv)))
    reps.append(VerificationReport.make("tc-qv-mean", "QV estimator mean equals h(t)", qv.mean(), 1.0, 4 * se * ts, se))
    tel = TC.qv_telescoping(tc, edges)
    reps.append(VerificationReport.make("tc-qv-telescoping", "sum of h increments equals h(t)",
                                        tel[0], tel[1], 1e-15 * ts))
    return reps


# -- graphs ---------------------------------------------------------------

@register("greens-identity", "Green's identity <phi, f>_E = sum phi Delta f mu and its adjoint form",
          ["laplacian_apply", "energy_inner", "greens_identity_check", "adjoint_check", "energy_kernel",
           "markov_kernel", "variance_decomposition_check"])
def greens(seed, quick, ts):
    rng = np.random.default_rng(seed)
    worst = {"greens-identity": 0.0, "energy-kernel": 0.0, "detailed-balance": 0.0,
             "variance-decomposition": 0.0, "stationary-vector": 0.0, "laplacian-psd": 0.0}
    pd_worst = 0.0
    for _ in range(_n(1000, 100, quick)):
        n = int(rng.integers(2, 51))
        g = GR.WeightedGraph.random(n, rng, density=float(rng.uniform(0.2, 1.0)))
        f, phi = rng.normal(size=n), rng.normal(size=n)
        sc = g.scale * n * max(1.0, float(np.max(np.abs(f)) * np.max(np.abs(phi))))
        r = GR.adjoint_check(g, phi, f)
        worst["greens-identity"] = max(worst["greens-identity"], r["diff"] / sc)
        A = list(np.flatnonzero(rng.random(n) < 0.5))
        B = list(np.flatnonzero(rng.random(n) < 0.5))
        ek = GR.energy_kernel(g, A, B)
        ei = g.energy_inner(g.indicator(A), g.indicator(B))
        worst["energy-kernel"] = max(worst["energy-kernel"], abs(ek - ei) / (g.scale * n))
        ff = g.energy_inner(f, f)
        worst["laplacian-psd"] = max(worst["laplacian-psd"], max(0.0, -ff) / sc,
                                     abs(ff - float(np.sum(f * g.laplacian_apply(f) * g.mu))) / sc)
        if np.all(g.rowsum > 0):
            worst["detailed-balance"] = max(worst["detailed-balance"], GR.detailed_balance_residual(g) / g.scale)
            v = GR.variance_decomposition_check(g, f)
            worst["variance-decomposition"] = max(worst["variance-decomposition"],
                                                  v["diff"] / (g.scale * n * max(1.0, float(np.max(f * f)))))
            worst["stationary-vector"] = max(worst["stationary-vector"], GR.stationary_residual(g))
        subsets = [list(np.flatnonzero(rng.random(n) < 0.4)) for _ in range(6)]
        G = GR.energy_kernel_gram(g, subsets)
        pd = K.check_pd(G)
        pd_worst = min(pd_worst, pd.min_eigenvalue / max(pd.scale, 1e-300))
    reps = [VerificationReport.make(k, CATALOG["greens-identity"].anchor if k == "greens-identity" else
                                    {"energy-kernel": "beta(A,B) = nu(A & B) - rho(A x B) = <chi_A, chi_B>_E",
                                     "detailed-balance": "c mu P is symmetric",
                                     "variance-decomposition": "|f|_E^2 = (|f - Pf|^2_nu + sum VAR_x nu) / 2",
                                     "stationary-vector": "row sums of W are stationary",
                                     "laplacian-psd": "sum f Delta f mu = |f|_E^2 >= 0"}[k],
                                    v, 0.0, 1e-10 * ts) for k, v in worst.items()]
    reps.append(VerificationReport.make("energy-kernel-pd", "energy kernel Grams are positive definite",
                                        min(0.0, pd_worst), 0.0, 1e-10 * ts))
    return reps


@register("membership-vs-energy", "norm of mu_f in the kernel space is at most |f|_E", ["membership_bound"])
def memb_energy(seed, quick, ts):
    rng = np.random.default_rng(seed)
    worst = -np.inf
    for _ in range(_n(200, 30, quick)):
        n = int(rng.integers(3, 20))
        g = GR.WeightedGraph.random(n, rng)
        subsets = [list(np.flatnonzero(rng.random(n) < 0.4)) or [0] for _ in range(3)]
        try:
            r = GR.membership_vs_energy(g, rng.normal(size=3), subsets)
        except K.NotRepresentableError:
            continue
        worst = max(worst, (r["bound"] - r["energy"]) / max(1.0, r["energy"]))
    return [VerificationReport.make("membership-vs-energy", CATALOG["membership-vs-energy"].anchor,
                                    max(0.0, worst), 0.0, 1e-9 * ts)]


MARKOV_GRAPHS = {
    "path3": ([1, 1, 1], [[0, 1, 1], [1, 2, 1]]),
    "triangle-weighted": ([1.0, 2.0, 0.5], [[0, 1, 1.0], [1, 2, 3.0], [0, 2, 0.5]]),
    "ring5": ([1, 1, 2, 1, 3], [[0, 1, 1], [1, 2, 2], [2, 3, 1], [3, 4, 0.5], [4, 0, 1], [1, 3, 0.7]]),
}


@register("markov-stationarity", "empirical occupation tends to the normalized row sums of W",
          ["simulate_chain"])
def markov(seed, quick, ts):
    reps = []
    steps = _n(1_000_000, 200_000, quick)
    for label, (mu, edges) in MARKOV_GRAPHS.items():
        g = GR.WeightedGraph.from_edges(mu, edges)
        run = GR.simulate_chain(g, 0, steps, 1, seed)
        reps.append(VerificationReport.make(f"markov-stationarity-{label}", CATALOG["markov-stationarity"].anchor,
                                            run.tv_distance(GR.stationary_distribution(g)), 0.0, 0.02 * ts,
                                            steps=steps))
    return reps


# -- Shannon --------------------------------------------------------------

@register("shannon-sampling", "sinc translates are orthonormal; sampling inverts reconstruction",
          ["sinc_kernel", "reconstruct", "sample", "isometry_check"])
def shannon(seed, quick, ts):
    rng = np.random.default_rng(seed)
    N = 32
    G = K.gram(SH.SINC, list(range(-N, N + 1))).entries
    sig = SH.BandlimitedSignal(tuple(rng.normal(size=2 * N + 1)))
    back = SH.sample(lambda x: SH.reconstruct(sig, x), N)
    iso = SH.isometry_check(sig)
    half = float(np.max(np.abs(SH.sample(lambda x: SH.sinc(x - 0.5), N) - SH.half_shift_samples(N))))
    return [VerificationReport.make("sinc-orthonormality", CATALOG["shannon-sampling"].anchor,
                                    float(np.max(np.abs(G - np.eye(len(G))))), 0.0, 1e-12 * ts),
            VerificationReport.make("sample-reconstruct", "sampling recovers the coefficients",
                                    float(np.max(np.abs(back - sig.alpha))), 0.0, 1e-12 * ts),
            VerificationReport.make("shannon-isometry", "int |f|^2 dx = sum a_n^2",
                                    iso["quadrature_norm_sq"], iso["l2_norm_sq"], 1e-3 * ts),
            VerificationReport.make("sinc-half-shift", "sinc(n - 1/2) closed form", half, 0.0, 1e-15 * ts)]
