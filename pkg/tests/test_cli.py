import csv
import io
import json

import pytest
from click.testing import CliRunner

from erwd.cli import main, read_config


@pytest.fixture
def runner():
    return CliRunner()


def rows(text):
    body = "\n".join(line for line in text.splitlines() if not line.startswith("#"))
    return list(csv.DictReader(io.StringIO(body)))


def test_simulate_files_are_byte_identical(runner, tmp_path):
    args = ["simulate", "--regime", "first-step", "--p", "0.5", "--q", "0.3", "--r", "0.2",
            "--n", "100", "--m", "10", "--seed", "7"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert runner.invoke(main, args + ["-o", str(a)]).exit_code == 0
    assert runner.invoke(main, args + ["-o", str(b)]).exit_code == 0
    assert a.read_bytes() == b.read_bytes()
    assert len(rows(a.read_text())) == 1000


def test_simulate_zero_start(runner):
    res = runner.invoke(main, ["simulate", "--init", "zero", "--regime", "full", "--n", "50", "--m", "3"])
    assert res.exit_code == 0
    assert {r["partial_sum"] for r in rows(res.stdout)} == {"0"}


def test_simulate_degenerate_walk(runner):
    res = runner.invoke(main, ["simulate", "--p", "1", "--q", "0", "--r", "0", "--boundary-ok",
                               "--init", "plus-one", "--n", "20"])
    assert res.exit_code == 0
    assert all(r["partial_sum"] == r["n"] for r in rows(res.stdout))


def test_simulate_boundary_needs_opt_in(runner):
    res = runner.invoke(main, ["simulate", "--p", "1", "--q", "0", "--r", "0"])
    assert res.exit_code == 2


def test_invalid_params_exit_2(runner):
    res = runner.invoke(main, ["simulate", "--p", "0.7", "--q", "0.4"])
    assert res.exit_code == 2
    assert "r=" in res.stderr


def test_simulate_echoes_run_spec(runner):
    res = runner.invoke(main, ["simulate", "--n", "3", "--seed", "5", "--format", "json-lines"])
    lines = res.stdout.splitlines()
    spec = json.loads(lines[0])["run_spec"]
    assert spec["seed"] == 5 and spec["n"] == 3 and spec["r"] == 0.2
    assert len(lines) == 4


def test_simulate_functional_values(runner):
    res = runner.invoke(main, ["simulate", "--functional", "sn-over-n", "--n", "100", "--m", "50"])
    assert res.exit_code == 0
    vals = [float(r["functional_value"]) for r in rows(res.stdout)]
    assert len(vals) == 50 and all(abs(v) <= 1 for v in vals)


def test_simulate_scaled(runner):
    res = runner.invoke(main, ["simulate", "--functional", "sn", "--y", "0:1", "--n", "10", "--m", "5"])
    assert res.exit_code == 0
    assert {r["functional_value"] for r in rows(res.stdout)} == {"0.0"}


def test_config_round_trip(runner, tmp_path):
    cfg, a, b = tmp_path / "run.cfg", tmp_path / "a.csv", tmp_path / "b.csv"
    res = runner.invoke(main, ["simulate", "--regime", "last-step", "--p", "0.4", "--q", "0.35",
                               "--n", "30", "--m", "4", "--seed", "3", "--emit-config", str(cfg), "-o", str(a)])
    assert res.exit_code == 0
    assert read_config(cfg)["regime"] == "last-step"
    assert runner.invoke(main, ["simulate", "--config", str(cfg), "-o", str(b)]).exit_code == 0
    assert a.read_bytes() == b.read_bytes()


def test_flags_override_config(runner, tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("# comment\nn = 5\nseed = 1\nregime = first-two\n")
    res = runner.invoke(main, ["simulate", "--config", str(cfg), "--n", "7"])
    assert res.exit_code == 0
    assert "# n=7" in res.stdout and "# regime=first-two" in res.stdout


def test_config_unknown_key(runner, tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("horizon = 5\n")
    assert runner.invoke(main, ["simulate", "--config", str(cfg)]).exit_code == 2


def test_moments_first_step(runner):
    res = runner.invoke(main, ["moments", "--regime", "first-step", "--p", "0.5", "--q", "0.3",
                               "--init", "plus-one", "--n", "10"])
    assert res.exit_code == 0
    table = rows(res.stdout)
    assert list(table[0]) == ["n", "mean", "second_moment", "variance"]
    for r in table:
        assert float(r["variance"]) == pytest.approx(0.76 * (int(r["n"]) - 1))
    assert float(table[-1]["mean"]) == pytest.approx(2.8)


def test_moments_first_and_last_step_mean(runner):
    res = runner.invoke(main, ["moments", "--regime", "first-and-last", "--p", "0.5", "--q", "0.3",
                               "--init", "plus-one", "--n", "100"])
    table = rows(res.stdout)
    assert float(table[0]["mean"]) == 1.0
    assert float(table[-1]["mean"]) - float(table[-2]["mean"]) == pytest.approx(1 / 9)


def test_moments_first_row_matches_init(runner):
    res = runner.invoke(main, ["moments", "--init", "minus-one", "--n", "2"])
    assert float(rows(res.stdout)[0]["mean"]) == -1.0


def test_limits_t41c(runner):
    res = runner.invoke(main, ["limits", "--theorem", "T41c", "--p", "0.8", "--q", "0.05",
                               "--format", "json-lines"])
    assert res.exit_code == 0
    payload = json.loads(res.stdout.splitlines()[1])
    assert payload["constants"]["EL"] == pytest.approx(0.81606, abs=2e-5)
    assert payload["constants"]["EL2_printed"] == pytest.approx(1.91823, abs=5e-5)
    assert payload["law"] is None


def test_limits_t52_atoms(runner):
    res = runner.invoke(main, ["limits", "--theorem", "T52", "--format", "json-lines"])
    payload = json.loads(res.stdout.splitlines()[1])
    flat = [x for atom in payload["atoms"] for x in atom]
    assert flat == pytest.approx([-0.2, 0.3, 0.0, 0.2, 0.2, 0.5])
    assert payload["weight_sum"] == pytest.approx(1.0)


def test_limits_domain_violation_exit_3(runner):
    res = runner.invoke(main, ["limits", "--theorem", "T41c", "--p", "0.5", "--q", "0.3"])
    assert res.exit_code == 3


def test_limits_unsupported_policy_exit_3(runner):
    res = runner.invoke(main, ["limits", "--theorem", "T41a", "--policy", "propagate"])
    assert res.exit_code == 3


def test_unknown_theorem_exit_2(runner):
    assert runner.invoke(main, ["limits", "--theorem", "T99"]).exit_code == 2
    assert runner.invoke(main, ["verify", "--theorem", "T99"]).exit_code == 2


def test_verify_needs_target(runner):
    assert runner.invoke(main, ["verify"]).exit_code == 2


def test_verify_pass_and_report(runner, tmp_path):
    out = tmp_path / "v.jsonl"
    res = runner.invoke(main, ["verify", "--theorem", "T52", "--n", "10000", "--m", "20000",
                               "--format", "json-lines", "-o", str(out)])
    assert res.exit_code == 0, res.stderr
    lines = [json.loads(x) for x in out.read_text().splitlines()]
    assert lines[0]["run_spec"]["theorem"] == "T52"
    assert lines[-1]["summary"]["passed"] is True
    rep = runner.invoke(main, ["report", str(out)])
    assert rep.exit_code == 0
    assert json.loads(rep.stdout)["passed"] is True


def test_verify_failure_exit_1(runner):
    # a horizon of 5 is far from the limit: the cluster check must fail
    res = runner.invoke(main, ["verify", "--theorem", "T52", "--n", "5", "--m", "20000"])
    assert res.exit_code == 1
    assert "FAIL" in res.stderr


def test_report_rejects_other_files(runner, tmp_path):
    bad = tmp_path / "x.jsonl"
    bad.write_text('{"a": 1}\n')
    assert runner.invoke(main, ["report", str(bad)]).exit_code == 2
