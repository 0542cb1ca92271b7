"""Smart-contract logic: quality scoring of commodities and the rating
contract computing a seller's per-trade reputation.

Scoring rule for a trade segment: any reading breaching a damage threshold
scores the whole segment 0.0 (complete spoilage); otherwise the score is
1 minus the fraction of readings in the boundary-violation zone. A segment
with no readings gets a configurable neutral score and is flagged as
unmonitored.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

from .errors import InvalidThresholds


@dataclass(frozen=True)
class QualityContract:
    """Per-commodity-type temperature thresholds; immutable once registered."""

    contract_id: str
    commodity_type: str
    damage_low: float
    boundary_low: float
    boundary_high: float
    damage_high: float
    max_score: float = 1.0

    def __post_init__(self):
        ordered = (
            self.damage_low <= self.boundary_low
            <= self.boundary_high <= self.damage_high
        )
        if not ordered:
            raise InvalidThresholds(
                f"contract {self.contract_id}: need damage_low <= boundary_low "
                f"<= boundary_high <= damage_high"
            )

    def in_damage_zone(self, reading: float) -> bool:
        return reading < self.damage_low or reading > self.damage_high

    def in_boundary_violation(self, reading: float) -> bool:
        """Outside the safe band but not yet a damage breach."""
        return not self.in_damage_zone(reading) and (
            reading < self.boundary_low or reading > self.boundary_high
        )


@dataclass(frozen=True)
class WarningEvent:
    """Damage-threshold breach alert for the commodity owner."""

    cid: str
    tick: int
    reading: float
    kind: str = "DamageBreach"


@dataclass(frozen=True)
class RatingConfig:
    """Rating-contract weights and staleness handling, set at network init."""

    weights: Tuple[float, float, float] = (1 / 3, 1 / 3, 1 / 3)
    staleness_gamma: float = 0.5
    inspection_period: int = 100
    neutral_score: float = 0.5
    flag_gamma: float = 0.5

    def __post_init__(self):
        if any(w < 0 for w in self.weights):
            raise ValueError("weights must be non-negative")
        if abs(sum(self.weights) - 1.0) > 1e-9:
            raise ValueError("weights must sum to 1")


@dataclass(frozen=True)
class TradeRatingInputs:
    """Inputs to the rating contract for one trade event."""

    rep_sens: float
    rep_trader: float
    rep_reg: float
    weights: Tuple[float, float, float]
    reg_issued_at: Optional[int] = None


def check_reading(contract: QualityContract, cid: str, reading: float,
                  tick: int) -> Optional[WarningEvent]:
    """Warning iff the reading lies outside the damage band."""
    if contract.in_damage_zone(reading):
        return WarningEvent(cid=cid, tick=tick, reading=reading)
    return None


def commodity_score(contract: QualityContract,
                    readings: Sequence[float]) -> float:
    """Quality score for the readings of one trade segment, in [0, 1]."""
    if not readings:
        return 1.0  # callers handle the empty-segment neutral case
    if any(contract.in_damage_zone(r) for r in readings):
        return 0.0
    violations = sum(1 for r in readings if contract.in_boundary_violation(r))
    return contract.max_score * (1.0 - violations / len(readings))


def overall_commodity_rating(sensor_scores: Sequence[float],
                             neutral_score: float = 0.5) -> Tuple[float, bool]:
    """Aggregate rating over the per-trade score vector.

    Returns (rating, unmonitored); an empty vector yields the neutral score
    flagged as unmonitored.
    """
    if not sensor_scores:
        return neutral_score, True
    return sum(sensor_scores) / len(sensor_scores), False


def reduce_weight(weights: Tuple[float, float, float], index: int,
                  gamma: float) -> Tuple[float, float, float]:
    """Scale weights[index] by gamma and redistribute the deficit
    proportionally over the remaining weights; result sums to 1."""
    reduced = weights[index] * gamma
    deficit = weights[index] - reduced
    rest = sum(w for i, w in enumerate(weights) if i != index)
    out = []
    for i, w in enumerate(weights):
        if i == index:
            out.append(reduced)
        elif rest > 0:
            out.append(w + deficit * (w / rest))
        else:
            out.append(w)
    return tuple(out)


def apply_staleness(weights: Tuple[float, float, float],
                    reg_issued_at: Optional[int], now: int,
                    inspection_period: int,
                    gamma: float) -> Tuple[float, float, float]:
    """Reduce the regulator weight w3 when its rating is older than the
    inspection period (a missing rating counts as fully expired)."""
    if reg_issued_at is None:
        return reduce_weight(weights, 2, 0.0)
    if now - reg_issued_at > inspection_period:
        return reduce_weight(weights, 2, gamma)
    return weights


def compute_seller_rep(inputs: TradeRatingInputs, now: int,
                       inspection_period: int, gamma: float) -> float:
    """Weighted-sum seller reputation for one trade, after staleness
    adjustment of the regulator weight."""
    w1, w2, w3 = apply_staleness(
        inputs.weights, inputs.reg_issued_at, now, inspection_period, gamma
    )
    return w1 * inputs.rep_sens + w2 * inputs.rep_trader + w3 * inputs.rep_reg


@dataclass
class ContractRegistry:
    """Registered quality contracts, addressable by contract id."""

    contracts: dict = field(default_factory=dict)

    def instantiate(self, contract: QualityContract) -> QualityContract:
        from .errors import DuplicateContract

        if contract.contract_id in self.contracts:
            raise DuplicateContract(contract.contract_id)
        self.contracts[contract.contract_id] = contract
        return contract

    def get(self, contract_id: str) -> Optional[QualityContract]:
        return self.contracts.get(contract_id)
