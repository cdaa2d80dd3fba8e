"""CLI reports: subcommands, schema, exit codes."""

import json

import pytest

from gielab.cli import EXIT_INVALID, EXIT_PASS, EXIT_VIOLATION, main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_ledger_pass(capsys):
    code, report = run(["ledger", "--n", "3", "--m", "2", "--kappa", "2"], capsys)
    assert code == EXIT_PASS
    assert report["schema"] == "1"
    assert report["verdict"] == "pass"
    assert report["results"]["character_sum"] == 11
    assert report["results"]["codim_v"] == 11
    assert report["results"]["value_kind"] == "exact"


def test_ledger_minimal_kappa_echo(capsys):
    code, report = run(["ledger", "--n", "4", "--m", "5", "--kappa", "12"], capsys)
    assert code == EXIT_PASS
    assert report["results"]["min_kappa"] == 12


def test_ledger_invalid_kappa(capsys):
    code, report = run(["ledger", "--n", "4", "--m", "5", "--kappa", "11"], capsys)
    assert code == EXIT_INVALID
    assert report["verdict"] == "invalid-input"


def test_verify_lemma_random_psi(capsys):
    code, report = run(["verify-lemma", "--n", "2", "--m", "2", "--kappa", "1",
                        "--random-psi", "7"], capsys)
    assert code == EXIT_PASS
    assert report["results"]["gauss_map_zero"] is True
    assert report["results"]["jacobian_rank"] == 1
    assert all(r == "0" for r in report["results"]["cartan_identity_residuals"])


def test_verify_lemma_kappa_zero_is_invalid(capsys):
    code, report = run(["verify-lemma", "--n", "2", "--m", "2", "--kappa", "0",
                        "--random-psi", "7"], capsys)
    assert code == EXIT_INVALID


def test_verify_lemma_psi_file(tmp_path, capsys):
    # the three-sheet example: psi column (1, 0, 0) in the last base slot
    doc = {"n": 3, "m": 2,
           "psi": [["1/2", "1"], ["2", "0"], ["-1/3", "0"]]}
    path = tmp_path / "psi.json"
    path.write_text(json.dumps(doc))
    code, report = run(["verify-lemma", "--n", "3", "--m", "2", "--kappa", "2",
                        "--psi", str(path)], capsys)
    assert code == EXIT_PASS
    assert report["results"]["jacobian_rank"] == 3


def test_verify_lemma_requires_psi_source(capsys):
    code, report = run(["verify-lemma", "--n", "2", "--m", "2", "--kappa", "1"],
                       capsys)
    assert code == EXIT_INVALID


def test_flag_command(capsys):
    code, report = run(["flag", "--n", "2", "--m", "2", "--kappa", "1",
                        "--random-psi", "3"], capsys)
    assert code == EXIT_PASS
    assert report["results"]["cartan_test"] == "ordinary"
    assert report["results"]["characters"] == [1, 3]
    assert report["results"]["volume_form_value"] == "1"


def test_sweep_small_grid(capsys):
    code, report = run(["sweep", "--n-range", "2..3", "--m-range", "2..3",
                        "--seeds", "3"], capsys)
    assert code == EXIT_PASS
    assert report["results"]["total"] == 12
    assert report["results"]["violations"] == 0


def test_sweep_corrupt_injection(capsys):
    code, report = run(["sweep", "--n-range", "2..2", "--m-range", "2..2",
                        "--seeds", "1", "--inject-corrupt"], capsys)
    assert code == EXIT_VIOLATION
    corrupt = [c for c in report["results"]["cells"] if c["seed"] == "corrupt"]
    assert len(corrupt) == 1
    assert corrupt[0]["pass"] is False
    assert corrupt[0]["failed_block_level"] == [3, 2]


def test_sweep_empty_range_warns(capsys):
    code, report = run(["sweep", "--n-range", "4..3", "--m-range", "2..2",
                        "--seeds", "1"], capsys)
    assert code == EXIT_PASS
    assert "warning" in report["results"]


def _flat_chart_doc():
    one = [{"exponents": [0, 0], "coefficient": "1"}]
    return {
        "m": 2,
        "g": [[one, []], [[], one]],
        "T": [[one, []], [[], one]],
        "box": [[0, 1], [0, 1]],
        "margin": 0.05,
    }


def test_emt_audit_exact(tmp_path, capsys):
    path = tmp_path / "chart.json"
    path.write_text(json.dumps(_flat_chart_doc()))
    code, report = run(["emt-audit", "--input", str(path), "--backend", "exact"],
                       capsys)
    assert code == EXIT_PASS
    assert report["results"]["identity_holds"] is True
    assert report["results"]["max_identity_residual"] == 0.0
    assert report["results"]["target_dimension"] == 3


def test_emt_audit_numeric(tmp_path, capsys):
    path = tmp_path / "chart.json"
    path.write_text(json.dumps(_flat_chart_doc()))
    code, report = run(["emt-audit", "--input", str(path),
                        "--backend", "numeric"], capsys)
    assert code == EXIT_PASS
    assert report["results"]["max_identity_residual"] < 1e-6


def test_emt_audit_singular_metric(tmp_path, capsys):
    doc = _flat_chart_doc()
    doc["g"][1][1] = []  # second diagonal entry identically zero
    path = tmp_path / "chart.json"
    path.write_text(json.dumps(doc))
    code, report = run(["emt-audit", "--input", str(path)], capsys)
    assert code == EXIT_INVALID


def test_emt_audit_missing_file(capsys):
    code, report = run(["emt-audit", "--input", "/nonexistent.json"], capsys)
    assert code == EXIT_INVALID


def test_output_file_option(tmp_path, capsys):
    out = tmp_path / "report.json"
    code = main(["--output", str(out),
                 "ledger", "--n", "2", "--m", "2", "--kappa", "1"])
    assert code == EXIT_PASS
    report = json.loads(out.read_text())
    assert report["verdict"] == "pass"
    assert capsys.readouterr().out == ""


def test_reports_are_deterministic(capsys):
    _, first = run(["verify-lemma", "--n", "3", "--m", "3", "--kappa", "4",
                    "--random-psi", "99"], capsys)
    _, second = run(["verify-lemma", "--n", "3", "--m", "3", "--kappa", "4",
                     "--random-psi", "99"], capsys)
    first.pop("wall_time_s")
    second.pop("wall_time_s")
    assert first == second
