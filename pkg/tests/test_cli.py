"""End-to-end tests of the wfcheck command line."""

import json

import pytest
from click.testing import CliRunner

from wfcheck.main import cli


@pytest.fixture
def runner():
    return CliRunner(mix_stderr=False)


@pytest.fixture
def invoke(runner):
    def _invoke(*args):
        return runner.invoke(cli, ["--no-color", *[str(a) for a in args]])
    return _invoke


def write(tmp_path, text, name="p.wl"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


# ============================================================================
# ANALYZE
# ============================================================================

def test_analyze_woolam_json(invoke, fixtures_dir):
    result = invoke("analyze", fixtures_dir / "woolam.wl", "--format", "json")

    assert result.exit_code == 0, result.stderr
    data = json.loads(result.output)
    assert len(data["rows"]) == 7
    assert data["overall"] == "Secure"


def test_analyze_woolam_table(invoke, fixtures_dir):
    result = invoke("analyze", fixtures_dir / "woolam.wl")

    assert result.exit_code == 0
    lines = result.output.splitlines()
    assert lines[0] == "Protocol WooLamAmended (function MAX)"
    assert "skipped kas in A2: key position only" in lines
    assert lines[-1] == "Overall: Secure"


def test_cleartext_session_key_fails(invoke, fixtures_dir):
    result = invoke("analyze", fixtures_dir / "woolam_cleartext.wl")

    assert result.exit_code == 1
    assert "Violation" in result.output
    assert result.output.splitlines()[-1] == "Overall: NotProved"


def test_context_override(invoke, fixtures_dir):
    result = invoke(
        "analyze", fixtures_dir / "woolam.wl", "--context", fixtures_dir / "woolam_public_kas.ctx"
    )
    assert result.exit_code == 1


def test_function_name_is_case_insensitive(invoke, fixtures_dir):
    result = invoke("analyze", fixtures_dir / "woolam.wl", "--function", "EK", "--format", "json")

    assert result.exit_code == 0
    assert json.loads(result.output)["function"] == "ek"


def test_protocol_without_sends(invoke, fixtures_dir):
    result = invoke("analyze", fixtures_dir / "no_sends.wl")

    assert result.exit_code == 0
    assert "No send steps to analyze." in result.output


# ============================================================================
# INPUT ERRORS
# ============================================================================

def test_missing_file(invoke, tmp_path):
    result = invoke("analyze", tmp_path / "absent.wl")

    assert result.exit_code == 2
    assert "no such file" in result.stderr
    assert result.output == ""


def test_syntax_error(invoke, tmp_path):
    path = write(tmp_path, "protocol P\nagents A B\nmsg 1 A -> B : {A, B\n")
    result = invoke("analyze", path)

    assert result.exit_code == 2
    assert result.stderr.startswith("error: line 3")


def test_validation_error(invoke, tmp_path):
    path = write(
        tmp_path,
        "protocol P\nagents A B\nsymkey kab level {A,B}\n"
        "fresh nonce n by A level {A,B}\nmsg 1 B -> A : {n}kab\n",
    )
    result = invoke("analyze", path)

    assert result.exit_code == 2
    assert "generated by A" in result.stderr
    assert result.output == ""


def test_negative_depth_is_rejected(invoke, fixtures_dir):
    result = invoke("oracle", fixtures_dir / "woolam.wl", "--depth=-1")

    assert result.exit_code == 2
    assert result.stderr.startswith("error:")


def test_origins_requires_term(invoke, fixtures_dir):
    assert invoke("origins", fixtures_dir / "woolam.wl").exit_code == 2


# ============================================================================
# ROLES, ORIGINS, EVAL
# ============================================================================

def test_roles_with_messages(invoke, fixtures_dir):
    result = invoke("roles", fixtures_dir / "woolam.wl", "--messages")

    assert result.exit_code == 0
    assert "A2:" in result.output.splitlines()
    assert "Generalized messages (8):" in result.output


def test_roles_json(invoke, fixtures_dir):
    result = invoke("roles", fixtures_dir / "woolam.wl", "--format", "json")

    data = json.loads(result.output)
    assert [r["role"] for r in data["roles"]] == ["A1", "A2", "B1", "B2", "B3", "S1"]
    assert "messages" not in data


def test_origins(invoke, fixtures_dir):
    result = invoke("origins", fixtures_dir / "woolam.wl", "--term", "{B, kab}kas")

    assert result.exit_code == 0
    assert result.output.splitlines()[0] == "Origins of {B.kab^i}kas: 1"


@pytest.mark.parametrize("function, expected", [
    ("max", "{A,B,D,S}"),
    ("n", "{A,D,S}"),
    ("ek", "{A,B}"),
])
def test_eval_nested_keys(invoke, fixtures_dir, function, expected):
    result = invoke(
        "eval", "--function", function, "--atom", "alpha",
        "--term", "{A, {S, alpha, D}kas}kab", "--context", fixtures_dir / "example1.wl",
    )

    assert result.exit_code == 0, result.stderr
    assert result.output.strip().endswith(f"= {expected}")


# ============================================================================
# ORACLE
# ============================================================================

def test_oracle_finds_cleartext_leak(invoke, fixtures_dir):
    result = invoke("oracle", fixtures_dir / "woolam_cleartext.wl", "--sessions", "1")

    assert result.exit_code == 1
    assert "Leaked kab:" in result.output


def test_oracle_with_invariance_check(invoke, fixtures_dir):
    result = invoke("oracle", fixtures_dir / "woolam.wl", "--sessions", "1", "--depth", "3", "--check-invariant")

    assert result.exit_code == 0, result.output
    assert "No secret leaked." in result.output
    assert "Invariance holds on every deducible message." in result.output


def test_version(runner):
    result = runner.invoke(cli, ["--version"])
    assert result.exit_code == 0
    assert "1.0.0" in result.output
