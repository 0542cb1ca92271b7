"""Command-line client for the trustchain service.

The CLI is a thin HTTP client: point it at a running service with --url,
or let it talk to an in-process instance of the same FastAPI app (the
default, so no server is needed for local runs). Exit codes: 0 success,
1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import httpx


def _client(url: str | None) -> httpx.Client:
    if url:
        return httpx.Client(base_url=url, timeout=300.0)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service.app import app as service_app

    return TestClient(service_app)


def _post(client: httpx.Client, path: str, payload: dict) -> dict:
    response = client.post(path, json=payload)
    if response.status_code != 200:
        try:
            detail = response.json().get("detail", response.text)
        except ValueError:
            detail = response.text
        raise click.ClickException(f"{path} failed ({response.status_code}): "
                                   f"{detail}")
    return response.json()


def _parse_rates(spec: str) -> list:
    """Rates as 'start:stop:step' or a comma-separated list."""
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise click.BadParameter("expected start:stop:step")
        start, stop, step = (int(p) for p in parts)
        return list(range(start, stop + 1, step))
    return [int(p) for p in spec.split(",") if p]


@click.group()
@click.option("--url", default=None, envvar="TRUSTCHAIN_URL",
              help="Base URL of a running trustchain service; defaults to an "
                   "in-process instance.")
@click.pass_context
def main(ctx, url):
    """TrustChain scenario runner, attack suite, benchmark, and query tool."""
    ctx.obj = url


@main.command()
@click.option("--scenario", required=True,
              help="Path to a scenario file, or the name of a bundled one "
                   "(e.g. 'poc').")
@click.option("--seed", default=0, show_default=True)
@click.option("--out", type=click.Path(), default=None,
              help="Directory for report.json, events.jsonl, snapshot.json.")
@click.pass_obj
def run(url, scenario, seed, out):
    """Replay a scenario and report the outcome."""
    payload = {"seed": seed, "include_snapshot": out is not None}
    path = Path(scenario)
    if path.exists():
        payload["scenario_text"] = path.read_text()
    else:
        payload["scenario_name"] = scenario
    with _client(url) as client:
        data = _post(client, "/scenario/run", payload)
    report = data["report"]
    if out:
        out_dir = Path(out)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "report.json").write_text(json.dumps(report, indent=2))
        with (out_dir / "events.jsonl").open("w") as fh:
            for event in report["events"]:
                fh.write(json.dumps(event, sort_keys=True) + "\n")
        (out_dir / "snapshot.json").write_text(
            json.dumps(data["snapshot"], indent=2, sort_keys=True))
        click.echo(f"report written to {out_dir}/")
    click.echo(f"scenario: {report['scenario']}")
    click.echo(f"state digest: {report['state_digest']}")
    click.echo(f"chain valid: {report['chain_valid']}")
    failures = [r for r in report["assertion_results"] if not r["ok"]]
    for r in report["assertion_results"]:
        status = "PASS" if r["ok"] else "FAIL"
        click.echo(f"  [{status}] {r['kind']}: {r['detail']}")
    if failures:
        raise click.ClickException(f"{len(failures)} assertion(s) failed")


@main.command()
@click.option("--seed", default=0, show_default=True)
@click.pass_obj
def attacks(url, seed):
    """Run the full attack-defense suite."""
    with _client(url) as client:
        data = _post(client, "/attacks/run", {"seed": seed})
    for a in data["attacks"]:
        status = "PASS" if a["passed"] else "FAIL"
        click.echo(f"[{status}] {a['attack']}")
        for d in a["details"]:
            click.echo(f"    {d}")
    if not data["passed"]:
        raise click.ClickException("attack suite failed")


@main.command()
@click.option("--mode", "modes", multiple=True,
              type=click.Choice(["baseline", "trustchain"]),
              default=("trustchain",), show_default=True)
@click.option("--rates", default="10:100:10", show_default=True,
              help="start:stop:step or comma-separated tx/s values.")
@click.option("--duration", default=100.0, show_default=True)
@click.option("--runs", default=10, show_default=True)
@click.option("--tx-kind", type=click.Choice(["trade", "create"]),
              default="trade", show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", type=click.Path(), default=None,
              help="Directory for bench.csv and bench_summary.csv.")
@click.pass_obj
def bench(url, modes, rates, duration, runs, tx_kind, seed, out):
    """Sweep transaction send rates and report throughput/latency."""
    payload = {
        "rates": _parse_rates(rates), "duration": duration, "runs": runs,
        "tx_kind": tx_kind, "seed": seed, "modes": list(modes),
    }
    with _client(url) as client:
        data = _post(client, "/bench/run", payload)
    for sweep in data["sweeps"]:
        click.echo(f"{sweep['mode']}/{sweep['tx_kind']}: saturation at "
                   f"{sweep['saturation_rate']} tx/s")
        for rate, thr in sorted(sweep["avg_throughput"].items(),
                                key=lambda kv: int(kv[0])):
            lat = sweep["avg_latency"][rate]
            click.echo(f"  rate {rate:>4} tx/s  throughput {thr:7.2f} tx/s  "
                       f"mean latency {lat:7.3f} s")
    if data["comparison"]:
        click.echo("baseline vs trustchain:")
        for row in data["comparison"]["rows"]:
            click.echo(f"  rate {row['rate']:>4}  throughput delta "
                       f"{row['throughput_delta']:+7.2f}  latency delta "
                       f"{row['latency_delta']:+7.3f}")
    if out:
        out_dir = Path(out)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "bench.csv").write_text(data["csv"])
        (out_dir / "bench_summary.csv").write_text(data["summary_csv"])
        click.echo(f"CSV written to {out_dir}/")


@main.command()
@click.option("--snapshot", "snapshot_path", required=True,
              type=click.Path(exists=True),
              help="Snapshot file produced by 'run --out'.")
@click.option("--kind", required=True,
              help="Query kind, e.g. ProvenanceTrail or TopTraders.")
@click.option("--param", "params", multiple=True,
              help="Query parameter as key=value; repeatable.")
@click.option("--issuer", default="admin", show_default=True)
@click.option("--now", default=0, show_default=True)
@click.pass_obj
def query(url, snapshot_path, kind, params, issuer, now):
    """Run a read query against a saved state snapshot."""
    q = {"kind": kind}
    for p in params:
        if "=" not in p:
            raise click.BadParameter(f"expected key=value, got {p!r}")
        key, value = p.split("=", 1)
        q[key] = int(value) if value.isdigit() else value
    payload = {
        "snapshot": json.loads(Path(snapshot_path).read_text()),
        "query": q, "issuer": issuer or None, "now": now,
    }
    with _client(url) as client:
        data = _post(client, "/query", payload)
    click.echo(json.dumps(data["result"], indent=2, sort_keys=True))


@main.command()
@click.option("--snapshot", "snapshot_path", required=True,
              type=click.Path(exists=True))
@click.pass_obj
def verify(url, snapshot_path):
    """Verify hash-chain integrity of a saved snapshot."""
    payload = {"snapshot": json.loads(Path(snapshot_path).read_text())}
    with _client(url) as client:
        data = _post(client, "/verify", payload)
    click.echo(f"chain valid: {data['chain_valid']}")
    click.echo(f"state digest: {data['state_digest']}")
    if not data["chain_valid"]:
        raise click.ClickException("chain verification failed")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(host, port):
    """Start the HTTP service."""
    import uvicorn

    uvicorn.run("trustchain.service.app:app", host=host, port=port)


if __name__ == "__main__":
    sys.exit(main())
