import json

import pytest

from conftest import FIXTURES
from trskit.cli import main


def _run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, out


def test_solve_classical_exit_zero(capsys):
    code, out = _run(capsys, "solve", FIXTURES / "classical_diag.trs")
    assert code == 0
    assert "tight: True" in out


def test_solve_not_tight_exit_four_still_prints_bound(capsys):
    code, out = _run(capsys, "solve", FIXTURES / "example_2_9.trs")
    assert code == 4
    assert "lower bound" in out
    assert "-2.75" in out


def test_solve_parse_error_exit_two(tmp_path, capsys):
    bad = tmp_path / "bad.trs"
    bad.write_text("dim 2\nQ 0 0 oops\n")
    code, _ = _run(capsys, "solve", bad)
    assert code == 2


def test_solve_infeasible_exit_three(tmp_path, capsys):
    inst = tmp_path / "infeasible.trs"
    inst.write_text("dim 2\nQ 0 0 1.0\nQ 1 1 -1.0\nm 1\nA 0 0 1.0\nb 0 2.0\n")
    code, _ = _run(capsys, "solve", inst)
    assert code == 3


def test_missing_file_exit_two(capsys):
    code = main(["solve", "/nonexistent/path.trs"])
    assert code == 2


def test_json_output_deterministic(capsys):
    _, out1 = _run(capsys, "solve", FIXTURES / "classical_diag.trs", "--format", "json", "--seed", "7")
    _, out2 = _run(capsys, "solve", FIXTURES / "classical_diag.trs", "--format", "json", "--seed", "7")
    assert out1 == out2


def test_json_output_roundtrips(capsys):
    _, out = _run(capsys, "solve", FIXTURES / "classical_diag.trs", "--format", "json")
    data = json.loads(out)
    assert data["schema"] == 1
    assert data["exit_code"] == 0
    assert data["solution"]["tight"] is True
    assert "timings" not in data  # excluded unless --timings


def test_json_timings_flag(capsys):
    _, out = _run(capsys, "solve", FIXTURES / "classical_diag.trs", "--format", "json", "--timings")
    data = json.loads(out)
    assert "timings" in data and data["timings"]


def test_check_verb(capsys):
    code, out = _run(capsys, "check", FIXTURES / "classical_diag.trs")
    assert code == 0
    assert out.count("Satisfied") == 4

    code, out = _run(capsys, "check", FIXTURES / "example_3_11.trs")
    assert code != 0
    assert "condition relaxation: Satisfied" in out
    assert "condition convexify: Violated" in out


def test_certify_verb(capsys):
    code, out = _run(capsys, "certify", FIXTURES / "classical_diag.trs")
    assert code == 0
    assert "certify passed: True" in out
    assert "oracle (secular)" in out


def test_eig_verb(capsys):
    code, out = _run(capsys, "eig", FIXTURES / "classical_diag.trs")
    assert code == 0
    assert "lambda_hat: -1" in out


def test_env_seed_override(monkeypatch, capsys):
    monkeypatch.setenv("TRSKIT_SEED", "123")
    code, _ = _run(capsys, "solve", FIXTURES / "classical_diag.trs")
    assert code == 0


def test_flags_accepted(capsys):
    code, out = _run(
        capsys,
        "solve",
        FIXTURES / "classical_diag.trs",
        "--eps", "1e-6", "--delta", "0.05", "--gap", "1e-6", "--dense-cap", "100",
    )
    assert code == 0
