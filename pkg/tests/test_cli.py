import io
import json

import pytest

from sigmafield import checks
from sigmafield.cli import OPERATION_ROUTES, main

# every operation the library exposes through a subcommand
LIBRARY_OPERATIONS = [
    "measure_of", "intersection_measure", "cumulative", "refine",
    "gram", "check_pd", "rkhs_norm_sq", "membership_bound", "signed_measure_eval", "signed_measure_norm_sq",
    "sample_field", "ito_integral", "kl_sample", "quadratic_variation", "cross_variation",
    "gaussian_ibp_check", "moment_identity_check", "radon_nikodym_check",
    "fbm_covariance", "spectral_covariance", "factor_kernel_eval", "factorization_gram", "simulate_fbm",
    "filtration_split", "semimartingale_check", "paley_wiener_norm",
    "tc_covariance", "simulate_tc", "tc_quadratic_variation", "ito_formula_residual", "diffusion_solve",
    "mc_vs_pde",
    "laplacian_apply", "energy_inner", "greens_identity_check", "energy_kernel", "adjoint_check",
    "markov_kernel", "simulate_chain", "variance_decomposition_check",
    "sinc_kernel", "reconstruct", "sample", "isometry_check",
    "run_checks", "list_checks",
]


def run(args, tmp_path):
    out = io.StringIO()
    code = main(["--out-dir", str(tmp_path), *args], stdout=out)
    return code, out.getvalue()


def test_every_operation_has_a_route():
    assert sorted(OPERATION_ROUTES) == sorted(LIBRARY_OPERATIONS)
    for check in checks.CATALOG.values():
        assert set(check.operations) <= set(OPERATION_ROUTES), check.name


@pytest.mark.parametrize("op", sorted(OPERATION_ROUTES))
def test_route_runs(op, tmp_path):
    code, text = run(OPERATION_ROUTES[op], tmp_path)
    assert code == 0, text


def test_invalid_hurst_names_field(tmp_path, capsys):
    code, _ = run(["fbm", "--hurst", "1.5"], tmp_path)
    assert code == 2
    assert "params.hurst" in capsys.readouterr().err


def test_run_config_invalid_hurst(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"subcommand": "fbm", "params": {"hurst": 1.5}}))
    assert main(["run", str(cfg)]) == 2
    assert "params.hurst" in capsys.readouterr().err


def test_run_config_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"subcommand": "rkhs", "params": {"regoins": ["0:1"]}}))
    assert main(["run", str(cfg)]) == 2
    assert "params" in capsys.readouterr().err


def test_run_config_gram(tmp_path):
    out = tmp_path / "out"
    cfg = tmp_path / "gram.json"
    cfg.write_text(json.dumps({"subcommand": "rkhs", "seed": 3, "out_dir": str(out),
                               "params": {"op": "gram", "regions": ["0:0.5", "0.25:0.75"]}}))
    assert main(["run", str(cfg)], stdout=io.StringIO()) == 0
    lines = (out / "rkhs_gram.csv").read_text().splitlines()
    assert lines == ["item,[0,0.5),[0.25,0.75)", "[0,0.5),0.5,0.25", "[0.25,0.75),0.25,0.5"]
    rep = json.loads((out / "rkhs_report.json").read_text())
    assert rep["passed"] and rep["seed"] == 3


def test_list_checks_sorted_and_stable(tmp_path):
    code, a = run(["list-checks"], tmp_path)
    _, b = run(["list-checks"], tmp_path)
    lines = a.splitlines()
    assert code == 0 and a == b and lines == sorted(lines)
    assert any(line.startswith("qv-cell-identity (") for line in lines)
    assert any(line.startswith("greens-identity (") for line in lines)


def test_csv_format_and_reproducibility(tmp_path):
    args = ["fbm", "--hurst", "0.7", "--times", "0.5,1", "--paths", "50"]
    run(["--seed", "5", *args, "--out", str(tmp_path / "a.csv")], tmp_path)
    run(["--seed", "5", *args, "--out", str(tmp_path / "b.csv")], tmp_path)
    run(["--seed", "6", *args, "--out", str(tmp_path / "c.csv")], tmp_path)
    a, b, c = ((tmp_path / f).read_bytes() for f in ("a.csv", "b.csv", "c.csv"))
    assert a == b and a != c
    assert b"\r" not in a
    header, first = a.decode().splitlines()[:2]
    assert header == "path,t=0.5,t=1"
    assert all(len(v.replace("-", "").replace(".", "").split("e")[0].lstrip("0")) <= 17
               for v in first.split(",")[1:])


def test_report_fields_recomputable(tmp_path):
    code, _ = run(["fbm", "--hurst", "0.3", "--op", "spectral", "--times", "0.5,1"], tmp_path)
    rep = json.loads((tmp_path / "fbm_report.json").read_text())
    for r in rep["reports"]:
        assert r["passed"] == (abs(r["lhs"] - r["rhs"]) <= r["tolerance"])
    assert code == 0


def test_numeric_failure_exit_1(tmp_path):
    # a Monte Carlo check cannot pass at a thousandth of a standard error
    code, text = run(["--tolerance-scale", "1e-3", "fbm", "--hurst", "0.7", "--paths", "100"], tmp_path)
    rep = json.loads((tmp_path / "fbm_report.json").read_text())
    assert code == 1 and rep["failures"] == ["fbm-cholesky-covariance"] and not rep["passed"]
    assert "FAIL" in text


def test_bad_inputs_exit_2(tmp_path):
    assert run(["laplacian", "--graph", '{"mu": [1, -1]}'], tmp_path)[0] == 2
    assert run(["timechange", "--h", "power:-2"], tmp_path)[0] == 2
    assert run(["rkhs", "--regions", "0:2"], tmp_path)[0] == 2
    assert run(["shannon", "--coeffs", "1,2"], tmp_path)[0] == 2
    assert run(["fbm"], tmp_path)[0] == 2
    assert main(["run", str(tmp_path / "missing.json")]) == 2


def test_global_flags_after_subcommand(tmp_path):
    code, _ = run(["shannon", "--coeffs", "1,2,3", "--threads", "1", "--seed", "4"], tmp_path)
    assert code == 0
    assert json.loads((tmp_path / "shannon_report.json").read_text())["seed"] == 4


def test_verify_all_subset_byte_identical(tmp_path):
    sub = ["verify-all", "--quick", "--checks", "beta-pd,radon-nikodym,shannon-sampling"]
    main(["--out-dir", str(tmp_path / "a"), *sub], stdout=io.StringIO())
    main(["--out-dir", str(tmp_path / "b"), *sub], stdout=io.StringIO())
    a = (tmp_path / "a" / "verify_all.json").read_bytes()
    assert a == (tmp_path / "b" / "verify_all.json").read_bytes()
    assert b"runtime" not in a
