import json

import pytest
from click.testing import CliRunner

from trustchain.cli import _parse_rates, main


@pytest.fixture
def runner():
    return CliRunner()


def test_parse_rates():
    assert _parse_rates("10:30:10") == [10, 20, 30]
    assert _parse_rates("5,15") == [5, 15]
    import click
    with pytest.raises(click.BadParameter):
        _parse_rates("10:20")


def test_run_bundled_scenario(runner, tmp_path):
    result = runner.invoke(main, ["run", "--scenario", "poc",
                                  "--out", str(tmp_path / "out")])
    assert result.exit_code == 0, result.output
    assert "[PASS]" in result.output
    assert "[FAIL]" not in result.output
    report = json.loads((tmp_path / "out" / "report.json").read_text())
    assert report["chain_valid"]
    events = (tmp_path / "out" / "events.jsonl").read_text().splitlines()
    assert all(json.loads(line)["kind"] for line in events)
    assert (tmp_path / "out" / "snapshot.json").exists()


def test_run_scenario_from_file(runner, tmp_path):
    path = tmp_path / "tiny.yaml"
    path.write_text("version: 1\nname: tiny\n")
    result = runner.invoke(main, ["run", "--scenario", str(path)])
    assert result.exit_code == 0, result.output
    assert "scenario: tiny" in result.output


def test_run_unknown_scenario_fails(runner):
    result = runner.invoke(main, ["run", "--scenario", "no-such"])
    assert result.exit_code == 1


def test_run_failing_assertion_exits_nonzero(runner, tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("""
version: 1
name: bad
participants:
  - {id: farm, role: PrimaryProducer}
contracts:
  - {id: ct, commodity_type: frozen, damage_low: -25, boundary_low: -18,
     boundary_high: 0, damage_high: 4}
timeline:
  - {tick: 1, action: create, id: farm, cid: c1, contract: ct}
assertions:
  - {kind: owner, cid: c1, expect: nobody}
""")
    result = runner.invoke(main, ["run", "--scenario", str(path)])
    assert result.exit_code == 1
    assert "[FAIL]" in result.output


def test_verify_and_query_roundtrip(runner, tmp_path):
    out = tmp_path / "out"
    assert runner.invoke(main, ["run", "--scenario", "poc",
                                "--out", str(out)]).exit_code == 0
    snapshot = str(out / "snapshot.json")
    verify = runner.invoke(main, ["verify", "--snapshot", snapshot])
    assert verify.exit_code == 0
    assert "chain valid: True" in verify.output
    query = runner.invoke(main, [
        "query", "--snapshot", snapshot, "--kind", "ProvenanceTrail",
        "--param", "cid=c1", "--issuer", "admin"])
    assert query.exit_code == 0
    assert json.loads(query.output)["owners"][-1][1] == "shop"


def test_query_unauthorized_fails(runner, tmp_path):
    out = tmp_path / "out"
    runner.invoke(main, ["run", "--scenario", "poc", "--out", str(out)])
    result = runner.invoke(main, [
        "query", "--snapshot", str(out / "snapshot.json"),
        "--kind", "TopTraders", "--issuer", "shop"])
    assert result.exit_code == 1


def test_attacks_command(runner):
    result = runner.invoke(main, ["attacks"])
    assert result.exit_code == 0, result.output
    assert result.output.count("[PASS]") == 9


def test_bench_command_writes_csv(runner, tmp_path):
    result = runner.invoke(main, [
        "bench", "--mode", "baseline", "--mode", "trustchain",
        "--rates", "10,30", "--duration", "10", "--runs", "1",
        "--out", str(tmp_path / "b")])
    assert result.exit_code == 0, result.output
    assert "saturation at" in result.output
    assert "baseline vs trustchain:" in result.output
    csv = (tmp_path / "b" / "bench.csv").read_text().splitlines()
    assert csv[0].startswith("rate,run,mode")
    assert len(csv) == 1 + 2 * 2  # header + 2 rates x 1 run x 2 modes
    assert (tmp_path / "b" / "bench_summary.csv").exists()


def test_usage_errors_exit_2(runner):
    assert runner.invoke(main, ["no-such-command"]).exit_code == 2
    assert runner.invoke(main, ["bench", "--bogus-flag"]).exit_code == 2
    assert runner.invoke(main, ["run"]).exit_code == 2  # missing --scenario
