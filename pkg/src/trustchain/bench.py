"""Discrete-event benchmark of the simulated validation pipeline.

Models the endorse -> order -> validate/commit path with a solo orderer
and a single FIFO validation server. Calibration constants are chosen so
that the TrustChain trade workload saturates near 40 tx/s; they are
calibration targets, not measurements of any real deployment. Offered
load above the service capacity grows the validation queue, degrading
service (congestive collapse) and eventually dropping transactions.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace
from typing import Dict, List, Tuple

import numpy as np

from .errors import PlanMismatch

MODE_TRUSTCHAIN = "trustchain"
MODE_BASELINE = "baseline"


@dataclass(frozen=True)
class PipelineConfig:
    mode: str = MODE_TRUSTCHAIN
    tx_kind: str = "trade"  # or "create"
    # fixed per-tx endorsement delay, seconds
    endorsement_cost_trade: float = 0.05
    endorsement_cost_create: float = 0.08
    # solo-orderer batching
    batch_size: int = 50
    batch_timeout: float = 0.5
    # validation server
    validation_rate: float = 48.0        # tx/s before extra costs
    contract_cost: float = 0.003         # added per tx in trustchain mode
    resource_validation_cost: float = 0.002  # added per create tx
    queue_capacity: int = 400
    congestion_factor: float = 0.3

    def endorsement_cost(self) -> float:
        if self.tx_kind == "create":
            return self.endorsement_cost_create
        return self.endorsement_cost_trade

    def base_service_time(self) -> float:
        t = 1.0 / self.validation_rate
        if self.mode == MODE_TRUSTCHAIN:
            t += self.contract_cost
        if self.tx_kind == "create":
            t += self.resource_validation_cost
        return t


@dataclass(frozen=True)
class BenchPlan:
    send_rates: Tuple[int, ...] = tuple(range(10, 101, 10))
    duration: float = 100.0
    runs: int = 10
    tx_kind: str = "trade"
    seed: int = 0

    def __post_init__(self):
        if any(r <= 0 for r in self.send_rates):
            raise ValueError("send rates must be positive")


@dataclass
class PipelineTrace:
    """Per-transaction stage timestamps for one pipeline run."""

    issued: np.ndarray
    endorsed: np.ndarray
    ordered: np.ndarray
    committed: np.ndarray  # nan when not committed within the run
    dropped: np.ndarray    # bool mask


@dataclass
class RunStats:
    committed: int
    dropped: int
    queued_at_end: int
    throughput: float
    mean_latency: float
    max_latency: float


@dataclass
class BenchResult:
    mode: str
    tx_kind: str
    plan: BenchPlan
    per_run: Dict[int, List[RunStats]] = field(default_factory=dict)
    avg_throughput: Dict[int, float] = field(default_factory=dict)
    avg_latency: Dict[int, float] = field(default_factory=dict)
    saturation_rate: int = 0


def generate_arrivals(rate: int, duration: float, seed: int) -> np.ndarray:
    """Seeded uniform arrivals over the interval, sorted."""
    rng = np.random.default_rng(seed)
    n = int(round(rate * duration))
    return np.sort(rng.random(n) * duration)


def run_pipeline(config: PipelineConfig, issue_times: np.ndarray,
                 duration: float) -> PipelineTrace:
    """Deterministic trace of per-tx endorse/order/commit times."""
    n = len(issue_times)
    endorse_cost = config.endorsement_cost()
    endorsed = issue_times + endorse_cost

    # Solo orderer: close a batch after batch_size txs or batch_timeout.
    ordered = np.empty(n)
    i = 0
    while i < n:
        open_time = endorsed[i]
        deadline = open_time + config.batch_timeout
        j = i
        while (j < n and j - i < config.batch_size
               and endorsed[j] <= deadline):
            j += 1
        close_time = deadline if j - i < config.batch_size else endorsed[j - 1]
        ordered[i:j] = close_time
        i = j

    # Single FIFO validation server with congestion-dependent service time.
    base = config.base_service_time()
    cap = config.queue_capacity
    cfac = config.congestion_factor
    committed = np.full(n, math.nan)
    dropped = np.zeros(n, dtype=bool)
    commit_times: List[float] = []
    done_ptr = 0  # commit_times[:done_ptr] are <= current arrival
    server_free = 0.0
    for k in range(n):
        arrival = ordered[k]
        while done_ptr < len(commit_times) and commit_times[done_ptr] <= arrival:
            done_ptr += 1
        queue_len = len(commit_times) - done_ptr
        if queue_len >= cap:
            dropped[k] = True
            continue
        service = base * (1.0 + cfac * queue_len / cap)
        start = arrival if arrival > server_free else server_free
        finish = start + service
        commit_times.append(finish)
        server_free = finish
        if finish <= duration:
            committed[k] = finish
    return PipelineTrace(issued=issue_times, endorsed=endorsed,
                         ordered=ordered, committed=committed, dropped=dropped)


def summarize(trace: PipelineTrace, duration: float) -> RunStats:
    ok = ~np.isnan(trace.committed)
    committed = int(ok.sum())
    dropped = int(trace.dropped.sum())
    queued = len(trace.issued) - committed - dropped
    latencies = trace.committed[ok] - trace.issued[ok]
    return RunStats(
        committed=committed,
        dropped=dropped,
        queued_at_end=queued,
        throughput=committed / duration,
        mean_latency=float(latencies.mean()) if committed else 0.0,
        max_latency=float(latencies.max()) if committed else 0.0,
    )


def committed_order(trace: PipelineTrace) -> List[int]:
    """Workload indices in commit order (FIFO, minus drops and stragglers)."""
    return [i for i in range(len(trace.issued))
            if not math.isnan(trace.committed[i])]


def _cell_seed(plan: BenchPlan, rate: int, run: int) -> int:
    return (plan.seed * 1_000_003 + rate * 1_009 + run) & 0x7FFFFFFF


def find_saturation(rates: List[int], throughputs: List[float],
                    eps: float = 0.5) -> int:
    """First rate at which throughput stops increasing."""
    for i in range(len(rates) - 1):
        if throughputs[i + 1] <= throughputs[i] + eps:
            return rates[i]
    return rates[-1]


def run_bench(plan: BenchPlan, config: PipelineConfig) -> BenchResult:
    """Sweep send rates, average runs, and locate the saturation point."""
    config = replace(config, tx_kind=plan.tx_kind)
    result = BenchResult(mode=config.mode, tx_kind=plan.tx_kind, plan=plan)
    for rate in plan.send_rates:
        stats = []
        for run in range(plan.runs):
            arrivals = generate_arrivals(rate, plan.duration,
                                         _cell_seed(plan, rate, run))
            trace = run_pipeline(config, arrivals, plan.duration)
            stats.append(summarize(trace, plan.duration))
        result.per_run[rate] = stats
        result.avg_throughput[rate] = sum(s.throughput for s in stats) / len(stats)
        result.avg_latency[rate] = sum(s.mean_latency for s in stats) / len(stats)
    rates = list(plan.send_rates)
    result.saturation_rate = find_saturation(
        rates, [result.avg_throughput[r] for r in rates])
    return result


def compare_modes(baseline: BenchResult, trustchain: BenchResult) -> dict:
    """Per-rate throughput/latency deltas (baseline minus trustchain)."""
    if (baseline.plan.send_rates != trustchain.plan.send_rates
            or baseline.plan.duration != trustchain.plan.duration
            or baseline.plan.runs != trustchain.plan.runs
            or baseline.tx_kind != trustchain.tx_kind):
        raise PlanMismatch("results come from different plans")
    rows = []
    for rate in baseline.plan.send_rates:
        rows.append({
            "rate": rate,
            "throughput_delta": (baseline.avg_throughput[rate]
                                 - trustchain.avg_throughput[rate]),
            "latency_delta": (trustchain.avg_latency[rate]
                              - baseline.avg_latency[rate]),
        })
    return {
        "tx_kind": baseline.tx_kind,
        "baseline_saturation": baseline.saturation_rate,
        "trustchain_saturation": trustchain.saturation_rate,
        "rows": rows,
    }


CSV_COLUMNS = ("rate", "run", "mode", "tx_kind", "throughput",
               "mean_latency_s", "max_latency_s", "committed", "dropped")


def to_csv(results: List[BenchResult]) -> str:
    """Per-run rows for one or more sweeps, in the documented column order."""
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(CSV_COLUMNS)
    for result in results:
        for rate in result.plan.send_rates:
            for run, s in enumerate(result.per_run[rate]):
                writer.writerow([
                    rate, run, result.mode, result.tx_kind,
                    f"{s.throughput:.4f}", f"{s.mean_latency:.4f}",
                    f"{s.max_latency:.4f}", s.committed, s.dropped,
                ])
    return out.getvalue()


def summary_csv(results: List[BenchResult]) -> str:
    """Per-rate averages, one sweep per (mode, tx_kind) pair."""
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(("rate", "mode", "tx_kind", "avg_throughput",
                     "avg_mean_latency_s"))
    for result in results:
        for rate in result.plan.send_rates:
            writer.writerow([
                rate, result.mode, result.tx_kind,
                f"{result.avg_throughput[rate]:.4f}",
                f"{result.avg_latency[rate]:.4f}",
            ])
    return out.getvalue()
