"""
Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

The lines are collected and repeated in the terminal summary, so a plain
``pytest -v`` run ends with the full verdict table.
"""

import io
import math
import time

import pytest

from conftest import ACCEPTANCE_LINES
from sigmafield.checks import CATALOG
from sigmafield.cli import main

SEED = 0


def reports_of(*names):
    out = []
    for name in names:
        out.extend(CATALOG[name].run(SEED, False, 1.0))
    return out


def record(number, title, ok, detail=""):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number:2d}: {title}" + (f" [{detail}]" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def verdict(number, title, reps, extra_ok=True, extra=""):
    failed = [r.name for r in reps if not r.passed]
    ok = not failed and extra_ok
    detail = f"{len(reps)} checks" + (f"; failed: {', '.join(failed)}" if failed else "") + (f"; {extra}" if extra else "")
    record(number, title, ok, detail)
    assert not failed, failed
    assert extra_ok, extra


def test_01_covariance_law():
    t0 = time.perf_counter()
    reps = reports_of("covariance-law")
    dt = time.perf_counter() - t0
    r = reps[0]
    assert r.rhs == 0.25 and r.details["n_paths"] == 200_000
    verdict(1, "covariance law at 2e5 paths within 4 SE of 0.25, under 10 s", reps, dt < 10,
            f"cov={r.lhs:.5f} se={r.se:.2e} time={dt:.2f}s")


def test_02_qv_cell_identity():
    reps = reports_of("qv-cell-identity")
    names = {r.name: r for r in reps}
    assert names["qv-cell-identity"].tolerance == 0.2 and names["qv-fourth-moment"].tolerance == 0.1
    assert names["qv-partition"].tolerance == 0.2
    verdict(2, "QV cell identity, fourth moment and 100-cell partition ratio", reps,
            extra=", ".join(f"{r.name}={r.lhs:.3f}" for r in reps))


def test_03_fbm_triangle():
    t0 = time.perf_counter()
    reps = [r for r in reports_of("fbm-triangle") if "H0.5" not in r.name]
    dt = time.perf_counter() - t0
    assert len(reps) == 6 and all(r.tolerance == 1e-3 for r in reps)
    verdict(3, "fBM closed form / spectral / moving-average Gram within 1e-3 for H 0.3, 0.7, under 60 s",
            reps, dt < 60, f"worst rel={max(r.lhs for r in reps):.2e} time={dt:.2f}s")


def test_04_hurst_half():
    reps = reports_of("hurst-half-degeneracy")
    gap = next(r for r in reps if r.name == "fbm-vs-timechange-H0.7").details["gap"]
    verdict(4, "H = 1/2 degeneracy, and fBM vs time change differ by > 0.01 at H = 0.7", reps,
            gap > 0.01, f"H=0.7 gap={gap:.4f}")


def test_05_kl_expansion():
    reps = reports_of("kl-parseval")
    byname = {r.name: r for r in reps}
    assert byname["kl-coordinates"].details["n_samples"] == 100_000
    verdict(5, "KL truncated Parseval within 1e-2 at 256 Haar terms; |r| < 0.02 at 1e5 samples", reps,
            extra=f"parseval={byname['kl-parseval'].lhs:.5f} max|r|={byname['kl-coordinates'].lhs:.4f}")


def test_06_moments_and_ibp():
    reps = reports_of("moment-identities", "gaussian-ibp")
    assert {r.name for r in reps} >= {"moment-odd-n2", "moment-even-n2", "gaussian-ibp-quadratic", "gaussian-ibp-cubic"}
    verdict(6, "moment identities n = 0, 1, 2 and Gaussian IBP for quadratic and cubic p", reps)


def test_07_time_change():
    reps = reports_of("pde-mc-quadrature", "ito-formula-residual")
    assert any(r.name == "pde-quadrature-linear" for r in reps) and any(r.name == "pde-quadrature-power:2" for r in reps)
    slope = next(r for r in reps if r.name == "ito-formula-refinement-slope")
    means = ", ".join(f"{m:.1e}" for m in slope.details["means"])
    verdict(7, "PDE / quadrature / MC agree within 1e-2 for h = t, t^2; Ito residual ~ 0 and shrinking",
            reps, extra=f"residual means under 2x refinement: {means}; slope {slope.lhs:.2f}")


def test_08_laplacian_identities():
    reps = reports_of("greens-identity")
    verdict(8, "Green, energy kernel, detailed balance, variance decomposition on 1000 random graphs", reps,
            extra=f"worst scaled residual={max(r.lhs for r in reps if r.name != 'energy-kernel-pd'):.1e}")


def test_09_markov_stationarity():
    reps = reports_of("markov-stationarity")
    assert all(r.details["steps"] == 1_000_000 for r in reps)
    verdict(9, "chain occupation within TV 0.02 of normalized row sums after 1e6 steps", reps,
            extra=", ".join(f"{r.name.split('-', 2)[-1]}={r.lhs:.4f}" for r in reps))


def test_10_shannon():
    reps = reports_of("shannon-sampling")
    verdict(10, "sinc Gram = identity, sample o reconstruct = identity, quadrature within 1e-3 at window 32",
            reps)


def test_11_cantor():
    reps = reports_of("cantor-exact", "cantor-staircase-norm")
    verdict(11, "Cantor evaluations exact on triadic intervals; staircase norm^2 = 1 within 1e-6", reps)


def test_12_reproducibility(tmp_path):
    outs, texts = [], []
    for k in range(2):
        buf = io.StringIO()
        code = main(["--seed", str(SEED), "--out-dir", str(tmp_path / f"run{k}"), "verify-all", "--quick"], stdout=buf)
        outs.append((tmp_path / f"run{k}" / "verify_all.json").read_bytes())
        texts.append(buf.getvalue().replace(str(tmp_path / f"run{k}"), "OUT"))
    same = outs[0] == outs[1] and texts[0] == texts[1]
    record(12, "verify-all twice with one seed gives byte-identical outputs", same and code == 0,
           f"{len(outs[0])} bytes, exit {code}")
    assert same
    assert code == 0


def test_13_semimartingale_probe():
    reps = reports_of("semimartingale-probe")
    h5 = next(r for r in reps if r.name == "semimartingale-H0.5")
    h7 = next(r for r in reps if r.name == "semimartingale-H0.7")
    assert h5.tolerance == 1e-8 and math.isinf(h7.tolerance)
    verdict(13, "semimartingale residual <= 1e-8 at H = 0.5; reported at H = 0.7", reps,
            math.isfinite(h7.lhs), f"H=0.5 residual={h5.lhs:.1e}, H=0.7 residual={h7.lhs:.4f}")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
