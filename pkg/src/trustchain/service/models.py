"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from typing import Dict, List, Optional

from pydantic import BaseModel, Field


class ScenarioRunRequest(BaseModel):
    scenario_text: Optional[str] = None
    scenario_name: Optional[str] = None  # bundled scenario, e.g. "poc"
    seed: int = 0
    include_snapshot: bool = False


class ScenarioRunResponse(BaseModel):
    report: dict
    snapshot: Optional[dict] = None


class AttackSuiteRequest(BaseModel):
    seed: int = 0


class AttackSuiteResponse(BaseModel):
    passed: bool
    attacks: List[dict]


class BenchRequest(BaseModel):
    rates: List[int] = Field(default_factory=lambda: list(range(10, 101, 10)))
    duration: float = 100.0
    runs: int = 10
    tx_kind: str = "trade"
    seed: int = 0
    modes: List[str] = Field(default_factory=lambda: ["trustchain"])


class BenchSweep(BaseModel):
    mode: str
    tx_kind: str
    saturation_rate: int
    avg_throughput: Dict[int, float]
    avg_latency: Dict[int, float]


class BenchResponse(BaseModel):
    sweeps: List[BenchSweep]
    comparison: Optional[dict] = None
    csv: str
    summary_csv: str


class QueryRequest(BaseModel):
    snapshot: dict
    query: dict
    issuer: Optional[str] = None
    now: int = 0


class QueryResponse(BaseModel):
    result: dict


class VerifyRequest(BaseModel):
    snapshot: dict


class VerifyResponse(BaseModel):
    chain_valid: bool
    state_digest: str
