"""Command-line interface: subcommands, exit codes, determinism."""

import json

from nk6 import cli


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_verify_reference_model(capsys):
    code, out, _ = run_cli(
        capsys, "verify", "--model", "dvv", "--seed", "7", "--samples", "200")
    assert code == 0
    doc = json.loads(out)
    assert doc["schema_version"] == "1"
    assert doc["summary"]["passed"] is True
    names = {c["name"] for s in doc["suites"] for c in s["checks"]}
    assert {"lagrangian", "h_values", "g_orientation", "codazzi", "laplacian"} <= names
    for suite in doc["suites"]:
        for check in suite["checks"]:
            assert "formula" in check and "max_residual" in check


def test_verify_synthetic_runs_matrix_suite_only(capsys):
    code, out, _ = run_cli(capsys, "verify", "--model", "synthetic:c")
    assert code == 0
    doc = json.loads(out)
    suite_names = {s["name"] for s in doc["suites"]}
    assert "canonical_algebra" in suite_names
    assert "immersion_invariants" not in suite_names


def test_verify_totally_geodesic(capsys):
    code, out, _ = run_cli(
        capsys, "verify", "--model", "totally-geodesic", "--samples", "100")
    assert code == 0
    assert json.loads(out)["summary"]["passed"] is True


def test_verify_rejects_invalid_table(capsys, tmp_path):
    bad = tmp_path / "bad.table"
    bad.write_text("1 2 3 +1\n1 2 4 -1\n")
    code, _, err = run_cli(capsys, "verify", "--table", str(bad))
    assert code == 2
    assert "axiom" in err


def test_verify_tolerance_override_can_fail(capsys):
    # an absurdly tight tolerance flips the check to failed and the exit to 1
    code, out, _ = run_cli(
        capsys, "verify", "--model", "synthetic:a", "--tol", "closed_form_match=1e-30")
    assert code == 1
    doc = json.loads(out)
    assert doc["summary"]["passed"] is False


def test_unknown_tolerance_key_is_config_error(capsys):
    code, _, err = run_cli(capsys, "verify", "--tol", "bogus=1")
    assert code == 2
    assert "bogus" in err


def test_unknown_model_is_config_error(capsys):
    code, _, err = run_cli(capsys, "verify", "--model", "klein-bottle")
    assert code == 2
    assert "klein-bottle" in err


def test_analyze_points_and_csv(capsys, tmp_path):
    out_dir = tmp_path / "out"
    code, out, _ = run_cli(
        capsys, "analyze", "--model", "dvv",
        "--points", "0.6,1.0,2.0;0.9,0.3,4.0", "--out", str(out_dir))
    assert code == 0
    doc = json.loads(out)
    assert len(doc["rows"]) == 2
    for row in doc["rows"]:
        assert abs(row["hsq"] - 3.125) < 1e-8
        assert abs(row["theta"] - 1.1180339887498949) < 1e-6
        assert abs(row["ric_min"] - 0.125) < 1e-8
        assert row["flag_ric_ge_3_4"] is False  # not totally geodesic
        assert row["flag_hsq_lt_5_2"] is False
        assert row["error"] == ""
    csv_text = (out_dir / "analyze_points.csv").read_text().splitlines()
    assert csv_text[0].startswith("eta,xi1,xi2,hsq,theta")
    assert len(csv_text) == 3


def test_analyze_flags_degenerate_point(capsys):
    code, out, _ = run_cli(
        capsys, "analyze", "--model", "dvv", "--points", "0.0,1.0,2.0")
    assert code == 0
    row = json.loads(out)["rows"][0]
    assert row["error"] != ""


def test_analyze_rejects_synthetic(capsys):
    code, _, err = run_cli(capsys, "analyze", "--model", "synthetic:b")
    assert code == 2
    assert "jets" in err


def test_integrate_report_and_files(capsys, tmp_path):
    out_dir = tmp_path / "quad"
    code, out, _ = run_cli(
        capsys, "integrate", "--model", "dvv", "--rule", "8,8,8",
        "--out", str(out_dir))
    assert code == 0
    doc = json.loads(out)
    ineq = doc["inequality"]
    assert abs(ineq["integral"]) < 1e-8
    assert ineq["classification"] == "DVV-type"
    assert (out_dir / "integrate_report.json").exists()
    samples = (out_dir / "integrand_samples.csv").read_text().splitlines()
    assert len(samples) == 8 * 8 * 8 + 1


def test_integrate_rule_convergence(capsys):
    code, out, _ = run_cli(capsys, "integrate", "--model", "dvv", "--rule", "8,8,8")
    vol_coarse = json.loads(out)["inequality"]["volume"]
    code, out, _ = run_cli(capsys, "integrate", "--model", "dvv", "--rule", "32,32,32")
    vol_fine = json.loads(out)["inequality"]["volume"]
    assert code == 0
    assert abs(vol_coarse - vol_fine) / vol_fine < 1e-6


def test_integrate_geodesic_classification(capsys):
    code, out, _ = run_cli(
        capsys, "integrate", "--model", "totally-geodesic", "--rule", "8,8,8")
    assert code == 0
    assert json.loads(out)["inequality"]["classification"] == "geodesic"


def test_report_bundles_everything(capsys):
    code, out, _ = run_cli(
        capsys, "report", "--model", "dvv", "--samples", "100",
        "--rule", "8,8,8", "--random", "3")
    assert code == 0
    doc = json.loads(out)
    assert "suites" in doc and "rows" in doc and "inequality" in doc


def test_deterministic_output(capsys):
    args = ("verify", "--model", "synthetic:c", "--seed", "11")
    code1, out1, _ = run_cli(capsys, *args)
    code2, out2, _ = run_cli(capsys, *args)
    assert code1 == code2 == 0
    assert out1 == out2


def test_csv_format_stdout(capsys):
    code, out, _ = run_cli(
        capsys, "analyze", "--model", "dvv", "--points", "0.5,0.5,0.5",
        "--format", "csv")
    assert code == 0
    assert out.startswith("eta,xi1,xi2")
