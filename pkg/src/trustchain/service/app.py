"""FastAPI service exposing scenario replay, the attack suite, benchmarks,
and snapshot queries. Every request runs against fresh state, so responses
are deterministic functions of their inputs."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import application
from .. import bench as bn
from .. import snapshot as snap
from ..attacks import run_attack_suite
from ..errors import ScenarioParseError, TrustChainError, Unauthorized
from ..scenario import bundled_scenario, bundled_scenario_names
from .models import (
    AttackSuiteRequest,
    AttackSuiteResponse,
    BenchRequest,
    BenchResponse,
    BenchSweep,
    QueryRequest,
    QueryResponse,
    ScenarioRunRequest,
    ScenarioRunResponse,
    VerifyRequest,
    VerifyResponse,
)

app = FastAPI(title="trustchain", version="0.1.0")


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "scenarios": bundled_scenario_names()}


@app.post("/scenario/run", response_model=ScenarioRunResponse)
def scenario_run(req: ScenarioRunRequest) -> ScenarioRunResponse:
    if (req.scenario_text is None) == (req.scenario_name is None):
        raise HTTPException(
            status_code=422,
            detail="provide exactly one of scenario_text or scenario_name")
    try:
        text = (req.scenario_text if req.scenario_text is not None
                else bundled_scenario(req.scenario_name))
    except FileNotFoundError:
        raise HTTPException(status_code=404,
                            detail=f"no bundled scenario {req.scenario_name!r}")
    try:
        from ..scenario import ScenarioRunner, parse_scenario

        runner = ScenarioRunner(parse_scenario(text), req.seed)
        report = runner.run()
    except ScenarioParseError as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    except TrustChainError as exc:
        raise HTTPException(status_code=400, detail=str(exc))
    snapshot = (snap.export_snapshot(runner.network)
                if req.include_snapshot else None)
    return ScenarioRunResponse(report=report.to_dict(), snapshot=snapshot)


@app.post("/attacks/run", response_model=AttackSuiteResponse)
def attacks_run(req: AttackSuiteRequest) -> AttackSuiteResponse:
    result = run_attack_suite(req.seed)
    return AttackSuiteResponse(**result)


@app.post("/bench/run", response_model=BenchResponse)
def bench_run(req: BenchRequest) -> BenchResponse:
    try:
        plan = bn.BenchPlan(send_rates=tuple(req.rates),
                            duration=req.duration, runs=req.runs,
                            tx_kind=req.tx_kind, seed=req.seed)
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    results = []
    for mode in req.modes:
        if mode not in (bn.MODE_BASELINE, bn.MODE_TRUSTCHAIN):
            raise HTTPException(status_code=422,
                                detail=f"unknown mode {mode!r}")
        results.append(bn.run_bench(plan, bn.PipelineConfig(mode=mode)))
    comparison = None
    by_mode = {r.mode: r for r in results}
    if bn.MODE_BASELINE in by_mode and bn.MODE_TRUSTCHAIN in by_mode:
        comparison = bn.compare_modes(by_mode[bn.MODE_BASELINE],
                                      by_mode[bn.MODE_TRUSTCHAIN])
    return BenchResponse(
        sweeps=[
            BenchSweep(mode=r.mode, tx_kind=r.tx_kind,
                       saturation_rate=r.saturation_rate,
                       avg_throughput=r.avg_throughput,
                       avg_latency=r.avg_latency)
            for r in results
        ],
        comparison=comparison,
        csv=bn.to_csv(results),
        summary_csv=bn.summary_csv(results),
    )


@app.post("/query", response_model=QueryResponse)
def query(req: QueryRequest) -> QueryResponse:
    try:
        network = snap.load_snapshot(req.snapshot)
    except (ValueError, KeyError) as exc:
        raise HTTPException(status_code=422, detail=f"bad snapshot: {exc}")
    try:
        result = application.query(network, req.query, issuer=req.issuer,
                                   now=req.now)
    except Unauthorized as exc:
        raise HTTPException(status_code=403, detail=str(exc))
    except TrustChainError as exc:
        raise HTTPException(status_code=404, detail=str(exc))
    return QueryResponse(result=result)


@app.post("/verify", response_model=VerifyResponse)
def verify(req: VerifyRequest) -> VerifyResponse:
    try:
        network = snap.load_snapshot(req.snapshot)
    except (ValueError, KeyError) as exc:
        raise HTTPException(status_code=422, detail=f"bad snapshot: {exc}")
    return VerifyResponse(chain_valid=network.verify_chain(),
                          state_digest=network.state_digest())
