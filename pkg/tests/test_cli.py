import json

import pytest
from typer.testing import CliRunner

from qjw import cli
from qjw.errors import SpecializationError

runner = CliRunner()


def invoke(*args):
    return runner.invoke(cli.app, list(args))


def test_verify_two_strands():
    result = invoke("verify", "--n", "2", "--depth", "3")
    assert result.exit_code == 0, result.output
    assert result.stdout.count("[PASS]") == 7
    assert "7/7 claims passed" in result.stdout


def test_verify_jw_json():
    result = invoke("verify", "--jw", "--n", "3", "--format", "json", "--threads", "2")
    assert result.exit_code == 0
    payload = json.loads(result.stdout)
    assert payload["summary"] == {"total": 5, "passed": 5, "failed": 0}
    assert {r["status"] for r in payload["reports"]} == {"pass"}


def test_verify_rejects_zero_strands():
    result = invoke("verify", "--n", "0")
    assert result.exit_code == 2
    assert "[USAGE]" in result.output


def test_verify_lemmas_and_audit():
    assert invoke("verify", "--lemmas", "--n", "2", "--depth", "3").exit_code == 0
    assert invoke("verify", "--audit", "--n", "2", "--depth", "2").exit_code == 0


@pytest.mark.parametrize(
    ("args", "mutation"),
    [
        (("verify", "--jw", "--n", "2"), "jw_sign_flip"),
        (("verify", "--n", "1", "--depth", "2"), "drop_ejw_normalizer"),
        (("verify", "--n", "1", "--depth", "2"), "perturb_f_coefficient"),
        (("prove",), "perturb_f_coefficient"),
        (("specialize", "--q0", "3/2", "--n", "2", "--jw"), "jw_sign_flip"),
    ],
)
def test_mutations_fail_with_counterexample(args, mutation):
    result = invoke(*args, "--mutation", mutation)
    assert result.exit_code == 1
    assert "[FAIL]" in result.stdout
    assert "first failure at level" in result.stdout


@pytest.mark.parametrize("flags", [("--jw", "--lemmas"), ("--lemmas", "--audit"), ("--jw", "--audit")])
def test_verify_suite_flags_are_exclusive(flags):
    result = invoke("verify", *flags, "--n", "2", "--depth", "2")
    assert result.exit_code == 2
    assert "mutually exclusive" in result.output


def test_ejw_export(tmp_path):
    out = tmp_path / "p.json"
    result = invoke("ejw", "--n", "1", "--depth", "1", "--out", str(out))
    assert result.exit_code == 0
    exported = json.loads(out.read_text(encoding="utf-8"))
    assert exported["operator"] == "ejw[1]"
    assert exported["regime"] == "symbolic"
    level_one = exported["blocks"][1]
    assert level_one["cols"] == [[0, 1], [1, 0]]
    assert [entry[:2] for entry in level_one["entries"]] == [[0, 0], [0, 1], [1, 0], [1, 1]]


def test_ejw_export_is_byte_identical_across_threads(tmp_path):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    assert invoke("ejw", "--n", "2", "--depth", "3", "--threads", "1", "--out", str(first)).exit_code == 0
    assert invoke("ejw", "--n", "2", "--depth", "3", "--threads", "4", "--out", str(second)).exit_code == 0
    assert first.read_bytes() == second.read_bytes()


def test_jw_export_covers_every_level():
    result = invoke("jw", "--n", "2")
    assert result.exit_code == 0
    exported = json.loads(result.stdout)
    assert [b["level"] for b in exported["blocks"]] == [0, 1, 2]


def test_op_list_and_export():
    listing = invoke("op", "--list")
    assert listing.exit_code == 0
    assert "coev[i]" in listing.stdout
    assert "E_tower[n]" in listing.stdout

    result = invoke("op", "ev[1]", "--n", "2", "--depth", "1")
    assert result.exit_code == 0
    exported = json.loads(result.stdout)
    assert exported["operator"] == "ev[1]"
    assert exported["level_shift"] == -1


def test_op_unknown_name():
    assert invoke("op", "bogus").exit_code == 2
    assert invoke("op", "e[5]", "--n", "3").exit_code == 2
    assert invoke("op").exit_code == 2


def test_write_failure_maps_to_io_exit(tmp_path):
    result = invoke("jw", "--n", "1", "--out", str(tmp_path / "missing" / "jw.json"))
    assert result.exit_code == 3


def test_prove_all():
    result = invoke("prove", "--all")
    assert result.exit_code == 0
    assert "9/9 claims passed" in result.stdout


def test_prove_single_target_and_agreement():
    result = invoke("prove", "--target", "F_mu", "--gen", "E")
    assert result.exit_code == 0
    assert "1/1 claims passed" in result.stdout
    result = invoke("prove", "--target", "E_mu", "--gen", "F", "--i", "0", "--i", "3")
    assert result.exit_code == 0
    assert "agree[i0=3]" in result.stdout


def test_prove_rejects_unknown_target():
    assert invoke("prove", "--target", "bogus").exit_code == 2
    assert invoke("prove", "--target", "E_mu", "--gen", "X").exit_code == 2


def test_specialize_at_a_point():
    result = invoke("specialize", "--n", "2", "--depth", "2", "--q0", "3/2", "--mu0", "20")
    assert result.exit_code == 0, result.output


@pytest.mark.parametrize(
    "args",
    [
        ("--q0", "1"),
        ("--q0", "0"),
        ("--q0", "abc"),
        ("--q0", "2", "--mu0", "3", "--n", "2", "--depth", "2"),
        ("--n", "2"),
    ],
)
def test_specialize_usage_errors(args):
    assert invoke("specialize", *args).exit_code == 2


def test_seeded_specialization_passes():
    result = invoke("specialize", "--seed", "7", "--n", "2", "--depth", "2", "--jw")
    assert result.exit_code == 0, result.output


def test_degenerate_point_without_seed(monkeypatch):
    def degenerate(*args, **kwargs):
        raise SpecializationError("denominator vanishes")

    monkeypatch.setattr(cli, "_specialized_reports", degenerate)
    result = invoke("specialize", "--q0", "2", "--n", "1", "--depth", "1")
    assert result.exit_code == 4
    assert "[DEGENERATE]" in result.output


def test_seeded_specialization_redraws(monkeypatch):
    calls = []

    def degenerate(config, regime, jw_only):
        calls.append(regime.q0)
        raise SpecializationError("denominator vanishes")

    monkeypatch.setattr(cli, "_specialized_reports", degenerate)
    monkeypatch.setattr(cli.settings, "max_redraws", 3)
    result = invoke("specialize", "--seed", "1", "--n", "1", "--depth", "1")
    assert result.exit_code == 4
    assert len(calls) == 3


def test_version_flag():
    result = invoke("--version")
    assert result.exit_code == 0
    assert result.stdout.strip() == cli.__version__
