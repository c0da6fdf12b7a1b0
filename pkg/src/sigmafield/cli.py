"""
Command-line front end.

Every subcommand turns its flags into a parameter mapping, validates it
against a JSON schema, runs, writes CSV arrays and a JSON report to the
output directory, and exits with 0 (all checks passed), 1 (a numeric check
failed) or 2 (invalid input).  ``run CONFIG`` reads the same mapping from a
file: ``{"subcommand": ..., "params": {...}, "seed": ..., "out_dir": ...}``.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction

import jsonschema
import numpy as np
from threadpoolctl import threadpool_limits

from . import _io
from . import checks as CK
from . import fbm as F
from . import field as FD
from . import graph as GR
from . import kernels as K
from . import measures as M
from . import shannon as SH
from . import timechange as TC

EXIT_OK, EXIT_NUMERIC, EXIT_INPUT = 0, 1, 2


class InputError(ValueError):
    pass


# -- parsing helpers -------------------------------------------------------

def _num(text: str):
    text = text.strip()
    if "/" in text:
        return Fraction(text)
    val = float(text)
    return int(val) if val.is_integer() and "." not in text and "e" not in text.lower() else val


def parse_region(spec) -> M.Region:
    """``"a:b"``, a union ``"a:b+c:d"``, atoms ``"atoms:0|1|2"``, or ``[a, b]``."""
    if isinstance(spec, (list, tuple)):
        if len(spec) != 2:
            raise InputError(f"region {spec!r} must be [a, b]")
        return M.Region.interval(spec[0], spec[1])
    spec = str(spec).strip()
    if spec.startswith("atoms:"):
        return M.Region.from_atoms(_num(x) for x in spec[6:].split("|") if x)
    pieces = []
    for part in spec.split("+"):
        try:
            a, b = part.split(":")
            pieces.append((_num(a), _num(b)))
        except ValueError as exc:
            raise InputError(f"cannot parse region {part!r}; expected a:b") from exc
    return M.Region.from_intervals(pieces)


def _floats(text):
    if text is None:
        return None
    if isinstance(text, (list, tuple)):
        return [float(x) for x in text]
    return [float(x) for x in str(text).replace(";", ",").split(",") if x.strip()]


def _load_json_arg(value):
    """Inline JSON, or a path to a JSON file, or the string itself."""
    if value is None or not isinstance(value, str):
        return value
    if os.path.exists(value):
        with open(value) as fh:
            text = fh.read()
        if value.endswith(".csv"):
            return text
        return json.loads(text)
    try:
        return json.loads(value)
    except json.JSONDecodeError:
        return value


# -- schemas ---------------------------------------------------------------

_REGION = {"oneOf": [{"type": "string"},
                     {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}]}
_MEASURE = {"type": "object", "required": ["kind"],
            "properties": {"kind": {"enum": ["lebesgue", "density", "atomic", "cantor"]},
                           "domain": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
                           "depth": {"type": "integer", "minimum": 1, "maximum": 60}}}
_POS_INT = {"type": "integer", "minimum": 1}
_NUMS = {"type": "array", "items": {"type": "number"}}

SCHEMAS = {
    "field": {"type": "object", "additionalProperties": False, "properties": {
        "op": {"enum": ["sample", "ito", "kl", "qv", "cross", "ibp", "moment"]},
        "measure": _MEASURE, "regions": {"type": "array", "items": _REGION, "minItems": 1},
        "paths": _POS_INT, "coeffs": _NUMS, "basis": {"enum": ["haar", "fourier-cosine"]},
        "terms": _POS_INT, "cells": _POS_INT, "mu": _MEASURE, "nu": _MEASURE,
        "coupling": {"enum": ["common", "independent"]},
        "poly": {"type": "array"}, "psi": _NUMS,
        "n": {"type": "integer", "minimum": 0, "maximum": FD.MAX_MOMENT_N},
        "parity": {"enum": ["odd", "even"]}}},
    "fbm": {"type": "object", "additionalProperties": False, "required": ["hurst"], "properties": {
        "op": {"enum": ["simulate", "covariance", "spectral", "gram", "kernel", "split", "semimartingale",
                        "paley-wiener"]},
        "hurst": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "times": {"type": "array", "items": {"type": "number", "minimum": 0}, "minItems": 1},
        "paths": _POS_INT, "method": {"enum": ["cholesky", "ito-grid"]},
        "x": _NUMS, "s": {"type": "number", "exclusiveMinimum": 0}, "t": {"type": "number", "exclusiveMinimum": 0},
        "grid": _POS_INT, "band": {"type": "number", "exclusiveMinimum": 0},
        "out": {"type": "string"}, "report": {"type": "string"}}},
    "timechange": {"type": "object", "additionalProperties": False, "properties": {
        "op": {"enum": ["compare", "covariance", "simulate", "qv", "ito"]},
        "h": {"oneOf": [{"type": "string"}, {"type": "array"}]},
        "f": {"enum": sorted(TC.FUNCTIONS)}, "t": {"type": "number", "exclusiveMinimum": 0},
        "s": {"type": "number", "minimum": 0},
        "x0": {"type": "number"}, "grid": _POS_INT, "paths": _POS_INT, "levels": _POS_INT,
        "times": {"type": "array", "items": {"type": "number", "minimum": 0}, "minItems": 1},
        "boundary": {"enum": ["dirichlet", "frozen", "reflecting"]}}},
    "laplacian": {"type": "object", "additionalProperties": False, "properties": {
        "graph": {"oneOf": [{"type": "object", "required": ["mu"]}, {"type": "string"}]},
        "check": {"type": "array", "items": {"enum": ["green", "pd", "balance", "variance", "energy-kernel",
                                                      "adjoint", "radon-nikodym", "laplacian"]}},
        "f": _NUMS, "phi": _NUMS,
        "subsets": {"type": "array", "items": {"type": "array", "items": {"type": "integer", "minimum": 0}}},
        "simulate": {"type": "integer", "minimum": 0}, "chains": _POS_INT,
        "x0": {"type": "integer", "minimum": 0}}},
    "shannon": {"type": "object", "additionalProperties": False, "required": ["coeffs"], "properties": {
        "coeffs": {"oneOf": [_NUMS, {"type": "string"}]}, "eval_at": _NUMS, "check": {"type": "boolean"}}},
    "rkhs": {"type": "object", "additionalProperties": False, "properties": {
        "op": {"enum": ["gram", "pd", "norm", "membership", "signed-measure", "measure"]},
        "kernel": {"enum": ["beta", "sinc", "fbm"]}, "hurst": {"type": "number", "exclusiveMinimum": 0,
                                                              "exclusiveMaximum": 1},
        "measure": _MEASURE, "regions": {"type": "array", "items": _REGION, "minItems": 1},
        "points": _NUMS, "coeffs": _NUMS, "values": _NUMS,
        "density": {"type": "string"}, "x": _NUMS, "factor": {"type": "integer", "minimum": 2}}},
    "verify-all": {"type": "object", "additionalProperties": False, "properties": {
        "quick": {"type": "boolean"}, "checks": {"type": "array", "items": {"enum": sorted(CK.CATALOG)}}}},
}

CONFIG_SCHEMA = {"type": "object", "required": ["subcommand"], "additionalProperties": False, "properties": {
    "subcommand": {"enum": sorted(SCHEMAS)}, "params": {"type": "object"},
    "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1}, "out_dir": {"type": "string"},
    "tolerance_scale": {"type": "number", "exclusiveMinimum": 0}}}


def validate(schema, obj, prefix):
    errors = sorted(jsonschema.Draft202012Validator(schema).iter_errors(obj), key=lambda e: list(e.path))
    if errors:
        e = errors[0]
        path = ".".join([prefix, *[str(p) for p in e.absolute_path]])
        raise InputError(f"{path}: {e.message}")


# -- run context -----------------------------------------------------------

class Context:
    def __init__(self, seed=0, out_dir="sigmafield_out", tol_scale=1.0, stdout=None):
        self.seed = int(seed)
        self.out_dir = out_dir
        self.tol_scale = float(tol_scale)
        self.stdout = stdout or sys.stdout
        self.reports: list[CK.VerificationReport] = []
        self.written: list[str] = []

    def path(self, name):
        os.makedirs(self.out_dir, exist_ok=True)
        return os.path.join(self.out_dir, name)

    def csv(self, name, header, rows, path=None):
        p = path or self.path(name)
        d = os.path.dirname(p)
        if d:
            os.makedirs(d, exist_ok=True)
        _io.write_csv(p, header, rows)
        self.written.append(p)

    def report(self, name, anchor, lhs, rhs, tol, se=None, **details):
        self.reports.append(CK.VerificationReport.make(name, anchor, lhs, rhs, tol * self.tol_scale, se, **details))

    def info(self, name, value, **details):
        """A reported quantity with no assertion attached."""
        self.reports.append(CK.VerificationReport.make(name, "reported value", value, 0.0, math.inf, **details))


def _measure(params, key="measure"):
    try:
        return M.measure_from_config(params.get(key, {"kind": "lebesgue"}))
    except ValueError as exc:
        raise InputError(f"params.{key}: {exc}") from exc


def _regions(params, default=("0:0.5", "0.25:0.75")):
    return [parse_region(r) for r in params.get("regions", list(default))]


# -- subcommand handlers -------------------------------------------------

def cmd_field(p, ctx: Context):
    op = p.get("op", "sample")
    m = _measure(p)
    spec = FD.FieldSpec(m, ctx.seed)
    n = p.get("paths", 10_000)
    regs = _regions(p)
    if op == "sample":
        ens = FD.sample_field(spec, regs, n)
        ens.to_csv(ctx.path("field_samples.csv"))
        ctx.written.append(ctx.path("field_samples.csv"))
        for i in range(len(regs)):
            for j in range(i, len(regs)):
                c, se = ens.cov(i, j)
                ctx.report(f"cov[{regs[i]},{regs[j]}]", "E[X_A X_B] = mu(A & B)", c,
                           m.measure(regs[i].intersect(regs[j])), 4 * se, se)
    elif op == "ito":
        coeffs = p.get("coeffs", [1.0] * len(regs))
        try:
            phi = FD.SimpleFunction(coeffs, regs)
        except ValueError as exc:
            raise InputError(f"params.regions: {exc}") from exc
        ens = FD.sample_field(spec, regs, n)
        x = FD.ito_integral(spec, phi, ens)
        ctx.csv("field_ito.csv", ["path", "X_phi"], ([str(i), v] for i, v in enumerate(x)))
        se = float((x * x).std(ddof=1) / math.sqrt(n))
        ctx.report("ito-isometry", "E[X_phi^2] = |phi|^2", float((x * x).mean()), phi.norm_sq(m), 5 * se, se)
    elif op == "kl":
        basis = FD.OrthonormalBasis(p.get("basis", "haar"), p.get("terms", 256))
        ens = FD.kl_sample(basis, regs, n, ctx.seed)
        ens.to_csv(ctx.path("field_kl.csv"))
        ctx.written.append(ctx.path("field_kl.csv"))
        for i in range(len(regs)):
            for j in range(i, len(regs)):
                exact = m.measure(regs[i].intersect(regs[j]))
                ctx.report(f"kl-parseval[{i},{j}]", "truncated Parseval sum vs mu(A & B)",
                           FD.kl_truncated_covariance(basis, regs[i], regs[j]), exact, 1e-2)
    elif op == "qv":
        cells = p.get("cells", 100)
        lo, hi = m.domain
        part = M.Partition.uniform(lo, hi, cells)
        st = FD.qv_partition_statistics(spec, part, n)
        ctx.report("qv-partition", "E|mu(B) - QV|^2 = sum 2 mu(A_i)^2", st["ratio"], 1.0, 0.2)
        c = FD.qv_cell_statistics(spec, regs[0], n)
        ctx.report("qv-cell", "E|mu(A) - X_A^2|^2 = 2 mu(A)^2", c["mse"] / c["mse_target"], 1.0, 0.2)
        ctx.report("qv-fourth", "E X_A^4 = 3 mu(A)^2", c["fourth"] / c["fourth_target"], 1.0, 0.1)
        ens = FD.sample_field(spec, list(part.cells), min(n, 1000))
        qv = FD.quadratic_variation(ens)
        ctx.csv("field_qv.csv", ["path", "qv"], ([str(i), v] for i, v in enumerate(qv)))
    elif op == "cross":
        mu = _measure(p, "mu") if "mu" in p else M.LebesgueMeasure()
        nu = _measure(p, "nu") if "nu" in p else M.LebesgueMeasure()
        cells = M.Partition.uniform(0.0, 1.0, p.get("cells", 200)).cells
        try:
            X, Y = FD.sample_coupled(mu, nu, m, cells, n, ctx.seed, p.get("coupling", "common"))
            limit = FD.cross_variation_limit(mu, nu, m, M.Region.interval(0, 1))
        except ValueError as exc:
            raise InputError(f"params.mu/nu: {exc}") from exc
        cv = FD.cross_variation(X, Y)
        ctx.csv("field_cross.csv", ["path", "cross", "qv_mu", "qv_nu"],
                ([str(i), a, b, c] for i, (a, b, c) in enumerate(zip(cv["cross"], cv["qv_mu"], cv["qv_nu"]))))
        se = float(cv["cross"].std(ddof=1) / math.sqrt(n))
        target = limit if p.get("coupling", "common") == "common" else 0.0
        ctx.report("cross-variation", "cross variation vs sqrt-density limit", float(cv["cross"].mean()),
                   target, 4 * se, se, limit=limit)
        ctx.report("polarization", "polarization identity per path", cv["polarization_residual"], 0.0, 1e-12)
    elif op in ("ibp", "moment"):
        if "regions" not in p:
            regs = _regions(p, ("0:0.5", "0.5:1"))
        coeffs = p.get("coeffs", [1.0] * len(regs))
        phi = FD.SimpleFunction(coeffs, regs)
        psi = FD.SimpleFunction(p.get("psi", coeffs), regs)
        if op == "ibp":
            try:
                poly = FD.Polynomial.from_config(p.get("poly", [0, 0, 0, 1]))
                r = FD.gaussian_ibp_check(poly, [phi], psi, spec, n, 4 * ctx.tol_scale)
            except ValueError as exc:
                raise InputError(f"params.poly: {exc}") from exc
            ctx.report("gaussian-ibp", "E[p(X_phi) X_psi] = E[p'(X_phi)] <phi, psi>", r["lhs"], r["rhs"],
                       4 * r["se"], r["se"])
        else:
            k = p.get("n", 1)
            par = p.get("parity", "odd")
            r = FD.moment_identity_check(k, phi, psi, spec, n, par)
            ctx.report(f"moment-{par}-n{k}", "odd/even moment identity", r["lhs"], r["rhs"],
                       (5 if par == "odd" else 4) * r["se"], r["se"])


def cmd_fbm(p, ctx: Context):
    model = F.HurstModel(p["hurst"])
    op = p.get("op", "simulate")
    times = sorted(p.get("times", [0.5, 1.0, 1.5, 2.0]))
    fk = F.FactorKernel(model)
    t = np.array(times)
    K_ = F.fbm_covariance(model, t[:, None], t[None, :])
    tlabels = [f"t={_io.fmt_float(x)}" for x in times]

    def matrix_csv(name, G):
        ctx.csv(name, ["time", *tlabels], ([lab, *row] for lab, row in zip(tlabels, G)), )

    if op == "simulate":
        method = p.get("method", "cholesky")
        n = p.get("paths", 10_000)
        ens = F.simulate_fbm(model, times, n, method, ctx.seed)
        out = p.get("out") or ctx.path("fbm_paths.csv")
        ctx.csv(None, ["path", *tlabels], ([str(i), *row] for i, row in enumerate(ens.values)), path=out)
        bias = ens.meta.get("bias_bound", 0.0)
        worst = 0.0
        for i in range(len(times)):
            for j in range(i, len(times)):
                c, se = ens.cov(i, j)
                if se > 0:
                    worst = max(worst, max(abs(c - K_[i, j]) - bias, 0.0) / se)
        ctx.report(f"fbm-{method}-covariance", "sample covariance vs closed form (in SE, after bias)",
                   worst, 0.0, 5.0, bias_bound=bias)
    elif op == "covariance":
        matrix_csv("fbm_covariance.csv", K_)
    elif op == "spectral":
        S = np.array([[F.spectral_covariance(model, a, b) for b in times] for a in times])
        matrix_csv("fbm_spectral.csv", S)
        ctx.report("spectral-vs-closed", "spectral integral vs closed form (relative)",
                   _relmax(S, K_), 0.0, 1e-3)
    elif op == "gram":
        G, E = F.factorization_gram(fk, times, return_errors=True)
        matrix_csv("fbm_factor_gram.csv", G.entries)
        ctx.report("factor-gram-vs-closed", "moving-average Gram vs closed form (relative)",
                   _relmax(G.entries, K_), 0.0, 1e-3, max_quadrature_error=float(E.max()))
    elif op == "kernel":
        xs = p.get("x", list(np.linspace(-2, max(times), 9)))
        rows = []
        for tt in times:
            for x in xs:
                vals = [F.factor_kernel_eval(fk, tt, x, part) for part in ("both", "minus", "plus")]
                rows.append([_io.fmt_float(tt), _io.fmt_float(x),
                             *[v if isinstance(v, str) else _io.fmt_float(v) for v in vals]])
        ctx.csv("fbm_kernel.csv", ["t", "x", "l", "l_minus", "l_plus"], rows)
    elif op == "split":
        n = p.get("paths", 10_000)
        r = F.filtration_split(fk, times, n, ctx.seed)
        xm, xp = r["ensemble_minus"].values, r["ensemble_plus"].values
        ctx.csv("fbm_split.csv", ["path", *[f"minus:{x}" for x in tlabels], *[f"plus:{x}" for x in tlabels]],
                ([str(i), *a, *b] for i, (a, b) in enumerate(zip(xm, xp))))
        prod = xm[:, 0] * xp[:, -1]
        se = float(prod.std(ddof=1) / math.sqrt(n))
        ctx.report("filtration-independence", "cov(X-, X+) = 0", float(prod.mean()), 0.0, 4 * se, se)
        Gm = F.factorization_gram(fk, times, "minus").entries
        Gp = F.factorization_gram(fk, times, "plus").entries
        ctx.report("filtration-additivity", "K = K- + K+", _relmax(Gm + Gp, K_), 0.0, 1e-8)
    elif op == "semimartingale":
        s, tt = p.get("s", 1.0), p.get("t", 2.0)
        r = F.semimartingale_check(fk, s, tt, p.get("grid", 512))
        if model.H == 0.5:
            ctx.report("semimartingale-residual", "projection residual (exact martingale case)",
                       r["residual"], 0.0, 1e-8)
        else:
            ctx.info("semimartingale-residual", r["residual"], s=s, t=tt, grid=r["grid"])
    elif op == "paley-wiener":
        b = p.get("band", 1.0)
        v = F.paley_wiener_norm(model, lambda lam: 1.0, support=(-b, b))
        exact = model.spectral_const * 2 * b ** (2 - 2 * model.H) / (2 - 2 * model.H)
        ctx.report("paley-wiener-box", "box transform norm vs closed form", v, exact, 1e-9 * max(1.0, exact))
    ctx.report_path = p.get("report")


def _relmax(A, B):
    A, B = np.asarray(A), np.asarray(B)
    den = np.where(B != 0, np.abs(B), 1.0)
    return float(np.max(np.abs(A - B) / den))


def _timechange(p):
    h = p.get("h", "linear")
    try:
        if isinstance(h, str) and h.endswith(".csv") and os.path.exists(h):
            h = np.loadtxt(h, delimiter=",", ndmin=2).tolist()
        else:
            h = _load_json_arg(h)
        return TC.TimeChange.named(h)
    except ValueError as exc:
        raise InputError(f"params.h: {exc}") from exc


def cmd_timechange(p, ctx: Context):
    tc = _timechange(p)
    op = p.get("op", "compare")
    f = p.get("f", "exp-bump")
    t = p.get("t", 1.0)
    x0 = p.get("x0", 0.0)
    n = p.get("paths", 100_000)
    if op == "compare":
        grid = p.get("grid", 801)
        fn = TC.named_function(f)[0]
        r = TC.mc_vs_pde(tc, f, t, x0, n, ctx.seed, n_x=grid, boundary=p.get("boundary", "dirichlet"))
        sol = TC.diffusion_solve(tc, fn, t, x0, n_x=grid, boundary=p.get("boundary", "dirichlet"))
        oracle = TC.gauss_hermite_expectation(fn, sol.x, float(tc.h(t)))
        ctx.csv("timechange_u.csv", ["x", "u_pde", "u_quadrature"], zip(sol.x, sol.u, oracle))
        ctx.report("pde-vs-quadrature", "Crank-Nicolson vs Gauss-Hermite at x0", r["u_pde"], r["u_quadrature"],
                   r["tolerances"]["pde"])
        ctx.report("mc-vs-quadrature", "Monte Carlo vs Gauss-Hermite at x0", r["u_mc"], r["u_quadrature"],
                   r["tolerances"]["mc"], r["se"])
        core = np.abs(sol.x - x0) <= 4 * math.sqrt(max(float(tc.h(t)), 1e-300))
        ctx.report("pde-max-norm", "max |u_pde - u_quadrature| on the core grid",
                   float(np.max(np.abs(sol.u - oracle)[core])), 0.0, 1e-2)
    elif op == "covariance":
        s = p.get("s", 1.0)
        ctx.info("tc-covariance", TC.tc_covariance(tc, s, t), s=s, t=t)
    elif op == "simulate":
        times = sorted(p.get("times", [0.5, 1.0, 2.0]))
        ens = TC.simulate_tc(tc, times, n, ctx.seed, x0)
        labels = [f"t={_io.fmt_float(x)}" for x in times]
        ctx.csv("timechange_paths.csv", ["path", *labels], ([str(i), *row] for i, row in enumerate(ens.values)))
        for i, s in enumerate(times):
            c, se = ens.cov(i, i) if x0 == 0 else (float(ens.values[:, i].var()), 0.0)
            ctx.report(f"variance[t={s}]", "Var X_t = h(t)", c, float(tc.h(s)), 4 * se if se else 1e-2, se)
    elif op == "qv":
        cells = p.get("grid", 100)
        edges = list(np.linspace(0.0, t, cells + 1))
        ens = TC.simulate_tc(tc, edges[1:], n, ctx.seed, x0)
        full = FD.PathEnsemble(np.hstack([np.full((ens.n_paths, 1), x0), ens.values]), tuple(edges))
        qv = TC.tc_quadratic_variation(tc, edges, full)
        se = float(qv.std(ddof=1) / math.sqrt(len(qv)))
        ctx.report("tc-qv-mean", "E QV = h(t)", float(qv.mean()), float(tc.h(t)), 4 * se, se)
        tel = TC.qv_telescoping(tc, edges)
        ctx.report("tc-qv-telescoping", "sum of increments of h = h(t)", tel[0], tel[1], 1e-12)
    elif op == "ito":
        r = TC.ito_formula_residual(tc, f, t, p.get("grid", 1024), n, ctx.seed, x0, p.get("levels", 1))
        ctx.csv("timechange_ito.csv", ["grid", "mean_residual", "se"], zip(r["grids"], r["means"], r["ses"]))
        ctx.report("ito-formula-residual", "mean discrete Ito residual", r["mean_residual"], 0.0, 4 * r["se"], r["se"])
        if "slope" in r:
            ctx.info("ito-refinement-slope", r["slope"])


def _graph(p):
    g = p.get("graph")
    if g is None:
        return GR.WeightedGraph.from_edges([1, 1, 1], [[0, 1, 1], [1, 2, 1]])
    try:
        if isinstance(g, str):
            if g.endswith(".csv"):
                return GR.WeightedGraph.from_adjacency_csv(g)
            return GR.WeightedGraph.from_json(_load_json_arg(g))
        return GR.WeightedGraph.from_json(g)
    except (ValueError, KeyError, OSError, IndexError) as exc:
        raise InputError(f"params.graph: {exc}") from exc


def cmd_laplacian(p, ctx: Context):
    g = _graph(p)
    rng = np.random.default_rng(ctx.seed)
    f = np.asarray(p.get("f", rng.normal(size=g.n)), dtype=float)
    phi = np.asarray(p.get("phi", rng.normal(size=g.n)), dtype=float)
    if f.shape != (g.n,) or phi.shape != (g.n,):
        raise InputError(f"params.f: vectors must have length {g.n}")
    subsets = p.get("subsets", [[0], list(range(g.n))])
    if any(x >= g.n for s in subsets for x in s):
        raise InputError("params.subsets: state index out of range")
    checks = p.get("check", ["green"])
    for c in checks:
        if c == "laplacian":
            d = g.laplacian_apply(f)
            ctx.csv("laplacian_delta_f.csv", ["state", "f", "delta_f"], ([str(i), a, b] for i, (a, b) in enumerate(zip(f, d))))
            ctx.info("energy", g.energy_inner(f, f))
        elif c in ("green", "adjoint"):
            r = GR.adjoint_check(g, phi, f, subsets)
            ctx.report("greens-identity" if c == "green" else "adjoint-identity",
                       "<phi, f>_E = sum phi Delta f mu", r["lhs"], r["rhs"], r["tolerance"])
            if c == "adjoint":
                for s, v in zip(subsets, r["mu_f"]):
                    ctx.info(f"mu_f[{','.join(map(str, s))}]", v)
        elif c == "energy-kernel":
            for A in subsets:
                for B in subsets:
                    ctx.report(f"energy-kernel[{A}|{B}]", "nu(A & B) - rho(A x B) = <chi_A, chi_B>_E",
                               GR.energy_kernel(g, A, B), g.energy_inner(g.indicator(A), g.indicator(B)),
                               1e-10 * g.scale * g.n)
        elif c == "pd":
            G = GR.energy_kernel_gram(g, subsets)
            r = K.check_pd(G)
            ctx.report("energy-kernel-pd", "min eigenvalue >= -1e-10 scale", min(0.0, r.min_eigenvalue), 0.0,
                       1e-10 * max(r.scale, 1e-300))
        elif c == "balance":
            try:
                P = GR.markov_kernel(g)
            except ValueError as exc:
                raise InputError(f"params.graph: {exc}") from exc
            ctx.csv("laplacian_markov.csv", ["state", *[str(i) for i in range(g.n)]],
                    ([str(i), *row] for i, row in enumerate(P)))
            ctx.report("detailed-balance", "c mu P symmetric", GR.detailed_balance_residual(g, P), 0.0,
                       1e-10 * g.scale)
            ctx.report("stationary-vector", "row sums of W are stationary", GR.stationary_residual(g), 0.0, 1e-10)
        elif c == "variance":
            r = GR.variance_decomposition_check(g, f)
            ctx.report("variance-decomposition", "energy = variance decomposition", r["energy"],
                       r["decomposition"], r["tolerance"])
        elif c == "radon-nikodym":
            r = FD.radon_nikodym_check(g, f, subsets)
            ctx.csv("laplacian_density.csv", ["state", "density"], ([str(i), v] for i, v in enumerate(r["density"])))
            ctx.report("radon-nikodym", "mu_f(A) = sum_A (Delta f) mu", r["max_diff"], 0.0, 1e-10 * g.scale * g.n)
    steps = p.get("simulate", 0)
    if steps:
        try:
            run = GR.simulate_chain(g, p.get("x0", 0), steps, p.get("chains", 1), ctx.seed)
        except ValueError as exc:
            raise InputError(f"params.graph: {exc}") from exc
        ctx.csv("laplacian_chain.csv", ["chain", *[f"step{i}" for i in range(min(steps, 1000) + 1)]],
                ([str(k), *[str(int(v)) for v in row[:1001]]] for k, row in enumerate(run.trajectories)))
        if run.occupation is not None:
            ctx.report("markov-stationarity", "TV(occupation, normalized row sums)",
                       run.tv_distance(GR.stationary_distribution(g)), 0.0, 0.02)


def _coefficients(value):
    v = _load_json_arg(value)
    if isinstance(v, str):
        v = [float(x) for x in v.replace("\n", ",").split(",") if x.strip()]
    if isinstance(v, dict):
        v = v.get("coeffs")
    try:
        return SH.BandlimitedSignal(tuple(v))
    except (TypeError, ValueError) as exc:
        raise InputError(f"params.coeffs: {exc}") from exc


def cmd_shannon(p, ctx: Context):
    sig = _coefficients(p["coeffs"])
    xs = p.get("eval_at", list(sig.window))
    vals = SH.reconstruct(sig, np.asarray(xs, dtype=float))
    ctx.csv("shannon_reconstruct.csv", ["x", "f"], zip(xs, np.atleast_1d(vals)))
    back = SH.sample(lambda x: SH.reconstruct(sig, x), sig.N)
    ctx.report("interpolation", "f(n) = a_n on the window", float(np.max(np.abs(back - sig.alpha))), 0.0, 1e-12)
    if p.get("check", False):
        r = SH.isometry_check(sig)
        ctx.report("isometry-gram", "a^T K a = |a|^2", r["pw_norm_sq"], r["l2_norm_sq"], 1e-12 * max(1.0, r["l2_norm_sq"]))
        ctx.report("isometry-quadrature", "int |f|^2 dx = |a|^2", r["quadrature_norm_sq"], r["l2_norm_sq"],
                   1e-3 * max(1.0, r["l2_norm_sq"]))
        G = K.gram(SH.SINC, list(sig.window)).entries
        ctx.report("sinc-orthonormality", "sinc Gram at integers = identity",
                   float(np.max(np.abs(G - np.eye(len(G))))), 0.0, 1e-12)


_DENSITIES = {"one": lambda x: np.ones_like(x), "x": lambda x: x, "indicator": lambda x: np.ones_like(x)}


def _density(name):
    if name in _DENSITIES:
        return _DENSITIES[name]
    if name.startswith("power:"):
        q = float(name.split(":", 1)[1])
        return lambda x: np.asarray(x, dtype=float) ** q
    raise InputError(f"params.density: unknown density {name!r}")


def cmd_rkhs(p, ctx: Context):
    op = p.get("op", "gram")
    kernel = p.get("kernel", "beta")
    if kernel == "beta":
        m = _measure(p)
        items = _regions(p)
        k = K.beta_kernel(m)
    elif kernel == "sinc":
        items = p.get("points", [0, 1, 2])
        k = SH.SINC
    else:
        if "hurst" not in p:
            raise InputError("params.hurst: required for the fbm kernel")
        items = p.get("points", [1.0, 2.0])
        k = F.fbm_kernel(F.HurstModel(p["hurst"]))
    if op == "measure":
        m = _measure(p)
        regs = _regions(p)
        rows = [[str(r), m.measure(r)] for r in regs]
        ctx.csv("rkhs_measure.csv", ["region", "measure"], rows)
        for i, a in enumerate(regs):
            for j, b in enumerate(regs):
                if j > i:
                    ctx.info(f"intersection[{a}|{b}]", M.intersection_measure(m, a, b))
        for x in p.get("x", []):
            ctx.info(f"cumulative[{x}]", M.cumulative(m, x))
        if "factor" in p:
            part = M.Partition(tuple(regs[:1]), regs[0])
            ref = M.refine(part, p["factor"], m)
            ctx.csv("rkhs_refined.csv", ["cell", "measure"], ([str(c), m.measure(c)] for c in ref.cells))
        return
    if op == "signed-measure":
        m = _measure(p)
        e = K.SignedMeasureElement(_density(p.get("density", "one")), m)
        regs = _regions(p)
        ctx.csv("rkhs_signed_measure.csv", ["region", "value"], ([str(r), e.evaluate(r)] for r in regs))
        ctx.info("norm_sq", e.norm_sq())
        return
    try:
        G = K.gram(k, items)
    except K.KernelEvaluationError as exc:
        raise InputError(f"params.regions: {exc}") from exc
    if op == "gram":
        G.to_csv(ctx.path("rkhs_gram.csv"))
        ctx.written.append(ctx.path("rkhs_gram.csv"))
    elif op == "pd":
        r = K.check_pd(G)
        ctx.report("check-pd", "min eigenvalue >= -1e-10 max|G|", min(0.0, r.min_eigenvalue), 0.0,
                   1e-10 * max(r.scale, 1e-300), min_eigenvalue=r.min_eigenvalue)
    elif op == "norm":
        coeffs = p.get("coeffs", [1.0] * G.n)
        try:
            ctx.info("rkhs-norm-sq", K.rkhs_norm_sq(G, coeffs))
        except ValueError as exc:
            raise InputError(f"params.coeffs: {exc}") from exc
    elif op == "membership":
        values = p.get("values", list(G.entries[0]))
        try:
            ctx.info("membership-bound", K.membership_bound(G, values))
        except K.NotRepresentableError as exc:
            ctx.report("membership-bound", "values outside the Gram column space", exc.residual, 0.0, 0.0)
        except ValueError as exc:
            raise InputError(f"params.values: {exc}") from exc


def cmd_verify_all(p, ctx: Context):
    reps = CK.run_checks(p.get("checks"), ctx.seed, p.get("quick", False), ctx.tol_scale)
    ctx.reports.extend(reps)
    for r in reps:
        print(r.line(), file=ctx.stdout)


HANDLERS = {"field": cmd_field, "fbm": cmd_fbm, "timechange": cmd_timechange, "laplacian": cmd_laplacian,
            "shannon": cmd_shannon, "rkhs": cmd_rkhs, "verify-all": cmd_verify_all}


def execute(subcommand, params, ctx: Context) -> int:
    validate(SCHEMAS[subcommand], params, "params")
    ctx.report_path = None
    try:
        HANDLERS[subcommand](params, ctx)
    except (F.QuadratureError, FD.FactorizationError, FloatingPointError, np.linalg.LinAlgError) as exc:
        ctx.reports.append(CK.VerificationReport.make("numeric-failure", str(exc), 1.0, 0.0, 0.0))
    except (M.MeasureDomainError, ValueError) as exc:
        raise InputError(f"params: {exc}") from exc
    passed = all(r.passed for r in ctx.reports)
    body = {"subcommand": subcommand, "seed": ctx.seed, "params": params, "passed": passed,
            "failures": [r.name for r in ctx.reports if not r.passed],
            "reports": [r.as_dict() for r in ctx.reports],
            "outputs": [os.path.basename(w) for w in ctx.written]}
    name = "verify_all.json" if subcommand == "verify-all" else f"{subcommand}_report.json"
    path = getattr(ctx, "report_path", None) or ctx.path(name)
    d = os.path.dirname(path)
    if d:
        os.makedirs(d, exist_ok=True)
    _io.write_json(path, body)
    if subcommand != "verify-all":
        for r in ctx.reports:
            print(r.line(), file=ctx.stdout)
    status = "all checks passed" if passed else f"{len(body['failures'])} check(s) failed"
    print(f"{subcommand}: {status}; report {path}", file=ctx.stdout)
    return EXIT_OK if passed else EXIT_NUMERIC


# Library operation -> a CLI invocation that exercises it.
_G3 = '{"mu": [1, 2, 1], "edges": [[0, 1, 1], [1, 2, 2], [0, 2, 0.5]]}'
OPERATION_ROUTES = {
    "measure_of": ["rkhs", "--op", "measure", "--regions", "0:0.5,0.25:1"],
    "intersection_measure": ["rkhs", "--op", "measure", "--regions", "0:0.5,0.25:1"],
    "cumulative": ["rkhs", "--op", "measure", "--measure", '{"kind": "cantor"}', "--x", "0.25,0.5"],
    "refine": ["rkhs", "--op", "measure", "--regions", "0:1", "--factor", "4"],
    "gram": ["rkhs", "--op", "gram", "--regions", "0:0.5,0.25:0.75,0.5:1"],
    "check_pd": ["rkhs", "--op", "pd", "--regions", "0:0.5,0.25:0.75,0.5:1"],
    "rkhs_norm_sq": ["rkhs", "--op", "norm", "--kernel", "sinc", "--points", "0,1,2", "--coeffs", "1,2,3"],
    "membership_bound": ["rkhs", "--op", "membership", "--regions", "0:0.5,0.5:1"],
    "signed_measure_eval": ["rkhs", "--op", "signed-measure", "--density", "x", "--regions", "0:0.5,0:1"],
    "signed_measure_norm_sq": ["rkhs", "--op", "signed-measure", "--density", "power:2"],
    "sample_field": ["field", "--op", "sample", "--paths", "2000"],
    "ito_integral": ["field", "--op", "ito", "--regions", "0:0.5,0.5:1", "--coeffs", "1,-2", "--paths", "2000"],
    "kl_sample": ["field", "--op", "kl", "--terms", "64", "--paths", "500"],
    "quadratic_variation": ["field", "--op", "qv", "--cells", "20", "--paths", "2000"],
    "cross_variation": ["field", "--op", "cross", "--cells", "50", "--paths", "2000",
                        "--mu", '{"kind": "density", "density": "power:1"}'],
    "gaussian_ibp_check": ["field", "--op", "ibp", "--poly", "0,0,0,1", "--paths", "5000"],
    "moment_identity_check": ["field", "--op", "moment", "--n", "1", "--paths", "5000"],
    "radon_nikodym_check": ["laplacian", "--graph", _G3, "--check", "radon-nikodym"],
    "fbm_covariance": ["fbm", "--hurst", "0.7", "--op", "covariance"],
    "spectral_covariance": ["fbm", "--hurst", "0.3", "--op", "spectral", "--times", "0.5,1"],
    "factor_kernel_eval": ["fbm", "--hurst", "0.7", "--op", "kernel", "--times", "1", "--x=-1,0,0.5,1,2"],
    "factorization_gram": ["fbm", "--hurst", "0.7", "--op", "gram", "--times", "0.5,1"],
    "simulate_fbm": ["fbm", "--hurst", "0.7", "--paths", "2000", "--method", "ito-grid", "--times", "0.5,1"],
    "filtration_split": ["fbm", "--hurst", "0.7", "--op", "split", "--paths", "2000", "--times", "0.5,1"],
    "semimartingale_check": ["fbm", "--hurst", "0.5", "--op", "semimartingale", "--grid", "64"],
    "paley_wiener_norm": ["fbm", "--hurst", "0.3", "--op", "paley-wiener"],
    "tc_covariance": ["timechange", "--op", "covariance", "--h", "power:2", "--s", "0.5", "--t", "1"],
    "simulate_tc": ["timechange", "--op", "simulate", "--h", "power:2", "--paths", "2000"],
    "tc_quadratic_variation": ["timechange", "--op", "qv", "--grid", "50", "--paths", "2000"],
    "ito_formula_residual": ["timechange", "--op", "ito", "--f", "square", "--grid", "64", "--paths", "2000"],
    "diffusion_solve": ["timechange", "--op", "compare", "--h", "power:2", "--f", "exp-bump", "--paths", "20000"],
    "mc_vs_pde": ["timechange", "--op", "compare", "--h", "linear", "--f", "sin", "--paths", "20000"],
    "laplacian_apply": ["laplacian", "--graph", _G3, "--check", "laplacian"],
    "energy_inner": ["laplacian", "--graph", _G3, "--check", "laplacian"],
    "greens_identity_check": ["laplacian", "--graph", _G3, "--check", "green"],
    "adjoint_check": ["laplacian", "--graph", _G3, "--check", "adjoint"],
    "energy_kernel": ["laplacian", "--graph", _G3, "--check", "energy-kernel", "--check", "pd"],
    "markov_kernel": ["laplacian", "--graph", _G3, "--check", "balance"],
    "simulate_chain": ["laplacian", "--graph", _G3, "--simulate", "20000"],
    "variance_decomposition_check": ["laplacian", "--graph", _G3, "--check", "variance"],
    "sinc_kernel": ["rkhs", "--op", "gram", "--kernel", "sinc", "--points", "0,0.5,1"],
    "reconstruct": ["shannon", "--coeffs", "1,-2,3", "--eval-at", "0,0.5,1.25"],
    "sample": ["shannon", "--coeffs", "1,-2,3"],
    "isometry_check": ["shannon", "--coeffs", "1,-2,3", "--check"],
    "run_checks": ["verify-all", "--quick", "--checks", "beta-pd,cantor-exact"],
    "list_checks": ["list-checks"],
}


# -- argparse -------------------------------------------------------------

def _global_flags(parser, suppress):
    d = argparse.SUPPRESS if suppress else None
    parser.add_argument("--seed", type=int, default=d if suppress else 0, help="64-bit seed")
    parser.add_argument("--threads", type=int, default=d, help="cap on BLAS worker threads")
    parser.add_argument("--out-dir", default=d if suppress else "sigmafield_out", help="output directory")
    parser.add_argument("--tolerance-scale", type=float, default=d if suppress else 1.0,
                        help="multiply every tolerance")


def build_parser():
    ap = argparse.ArgumentParser(prog="sigmafield", description=__doc__.strip().splitlines()[0],
                                 allow_abbrev=False)
    _global_flags(ap, False)
    sub = ap.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    _global_flags(common, True)

    s = sub.add_parser("field", parents=[common], allow_abbrev=False, help="Gaussian field on regions")
    s.add_argument("--op", choices=SCHEMAS["field"]["properties"]["op"]["enum"])
    s.add_argument("--measure", help="measure config as JSON or a JSON file")
    s.add_argument("--regions", help="regions a:b separated by ',' (unions with '+')")
    s.add_argument("--paths", type=int)
    s.add_argument("--coeffs")
    s.add_argument("--basis")
    s.add_argument("--terms", type=int)
    s.add_argument("--cells", type=int)
    s.add_argument("--mu")
    s.add_argument("--nu")
    s.add_argument("--coupling")
    s.add_argument("--poly", help="polynomial coefficients, e.g. 0,0,0,1 for x^3")
    s.add_argument("--psi")
    s.add_argument("--n", type=int)
    s.add_argument("--parity")

    s = sub.add_parser("fbm", parents=[common], allow_abbrev=False, help="fractional Brownian motion")
    s.add_argument("--op", choices=SCHEMAS["fbm"]["properties"]["op"]["enum"])
    s.add_argument("--hurst", type=float, required=True)
    s.add_argument("--times")
    s.add_argument("--paths", type=int)
    s.add_argument("--method")
    s.add_argument("--x")
    s.add_argument("--s", type=float)
    s.add_argument("--t", type=float)
    s.add_argument("--grid", type=int)
    s.add_argument("--band", type=float)
    s.add_argument("--out", help="CSV path for sampled paths")
    s.add_argument("--report", help="JSON path for the covariance report")

    s = sub.add_parser("timechange", parents=[common], allow_abbrev=False, help="time-changed Brownian motion")
    s.add_argument("--op", choices=SCHEMAS["timechange"]["properties"]["op"]["enum"])
    s.add_argument("--h", help="linear, power:p, a JSON table or a table file")
    s.add_argument("--f")
    s.add_argument("--t", type=float)
    s.add_argument("--s", type=float)
    s.add_argument("--x0", type=float)
    s.add_argument("--grid", type=int)
    s.add_argument("--paths", type=int)
    s.add_argument("--levels", type=int)
    s.add_argument("--times")
    s.add_argument("--boundary")

    s = sub.add_parser("laplacian", parents=[common], allow_abbrev=False, help="weighted graphs and reversible chains")
    s.add_argument("--graph", help="graph JSON {mu, edges}, a JSON file or an adjacency CSV")
    s.add_argument("--check", action="append",
                   choices=SCHEMAS["laplacian"]["properties"]["check"]["items"]["enum"])
    s.add_argument("--f")
    s.add_argument("--phi")
    s.add_argument("--subsets", help="JSON list of state lists")
    s.add_argument("--simulate", type=int, help="number of chain steps")
    s.add_argument("--chains", type=int)
    s.add_argument("--x0", type=int)

    s = sub.add_parser("shannon", parents=[common], allow_abbrev=False, help="Shannon sampling")
    s.add_argument("--coeffs", required=True, help="coefficients a_-N..a_N: list, JSON or file")
    s.add_argument("--eval-at")
    s.add_argument("--check", action="store_true")

    s = sub.add_parser("rkhs", parents=[common], allow_abbrev=False, help="kernels, Gram matrices and measures")
    s.add_argument("--op", choices=SCHEMAS["rkhs"]["properties"]["op"]["enum"])
    s.add_argument("--kernel")
    s.add_argument("--hurst", type=float)
    s.add_argument("--measure")
    s.add_argument("--regions")
    s.add_argument("--points")
    s.add_argument("--coeffs")
    s.add_argument("--values")
    s.add_argument("--density")
    s.add_argument("--x")
    s.add_argument("--factor", type=int)

    s = sub.add_parser("verify-all", parents=[common], allow_abbrev=False, help="run the verification catalog")
    s.add_argument("--quick", action="store_true")
    s.add_argument("--checks", help="comma-separated subset of check names")

    sub.add_parser("list-checks", parents=[common], allow_abbrev=False, help="print the verification catalog")
    s = sub.add_parser("run", parents=[common], allow_abbrev=False, help="run a JSON experiment config")
    s.add_argument("config")
    return ap


_LIST_FLAGS = {"times", "x", "coeffs", "psi", "values", "points", "f", "phi", "eval_at", "poly"}
_JSON_FLAGS = {"measure", "mu", "nu", "subsets"}
_SKIP = {"command", "seed", "threads", "out_dir", "tolerance_scale", "config"}


def params_from_args(args) -> dict:
    p = {}
    for k, v in vars(args).items():
        if k in _SKIP or v is None or v is False:
            continue
        if k == "regions":
            v = [r for r in v.split(",") if r.strip()]
        elif k == "checks":
            v = [c for c in v.split(",") if c]
        elif k == "coeffs" and args.command == "shannon":
            v = v if os.path.exists(v) else _floats(v)
        elif k == "f" and args.command != "laplacian":
            pass
        elif k in _LIST_FLAGS:
            v = _floats(v)
        elif k in _JSON_FLAGS:
            v = _load_json_arg(v)
        elif k == "graph":
            v = v if (os.path.exists(v) and v.endswith(".csv")) else _load_json_arg(v)
        elif k == "h":
            v = _load_json_arg(v)
        p[k] = v
    return p


def main(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        if args.command == "list-checks":
            for line in CK.list_checks():
                print(line, file=stdout)
            return EXIT_OK
        seed, out_dir, tscale = args.seed, args.out_dir, args.tolerance_scale
        if args.command == "run":
            try:
                with open(args.config) as fh:
                    cfg = json.load(fh)
            except (OSError, json.JSONDecodeError) as exc:
                raise InputError(f"config: {exc}") from exc
            validate(CONFIG_SCHEMA, cfg, "config")
            sub, params = cfg["subcommand"], cfg.get("params", {})
            seed = cfg.get("seed", seed)
            out_dir = cfg.get("out_dir", out_dir)
            tscale = cfg.get("tolerance_scale", tscale)
        else:
            sub, params = args.command, params_from_args(args)
        if not 0 <= seed < 2**64:
            raise InputError("seed: must be a 64-bit unsigned integer")
        if tscale <= 0:
            raise InputError("tolerance_scale: must be positive")
        ctx = Context(seed, out_dir, tscale, stdout)
        if args.threads:
            with threadpool_limits(limits=args.threads):
                return execute(sub, params, ctx)
        return execute(sub, params, ctx)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main_exit():
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
