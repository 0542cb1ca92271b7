"""Reputation aggregation and trust evaluation.

Per-trade seller reputations are aggregated into a time-decayed overall
reputation R(t_n) = sum_i rep_i * exp(-lambda * (t_n - t_i)), so recent
events dominate older ones. The trust score is a weighted linear
combination of R and feature scores; the single default feature is the
banded successful-transaction count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import DimensionMismatch

# (lower bound inclusive, upper bound inclusive or None, score); the
# printed bands overlap at 6, which we resolve to the >=6 band.
SUCCESSFUL_TX_BANDS = (
    (0, 0, -1.0),
    (1, 3, 0.5),
    (4, 5, 1.5),
    (6, None, 2.0),
)


@dataclass(frozen=True)
class TrustConfig:
    decay_lambda: float = 0.05
    alpha: Tuple[float, ...] = (1.0, 0.1)
    trust_min: float = 0.3
    recompute_period: int = 50

    def __post_init__(self):
        if self.decay_lambda < 0:
            raise ValueError("decay_lambda must be >= 0")
        if not self.alpha or self.alpha[0] <= 0:
            raise ValueError("alpha[0] must be positive")


@dataclass
class ReputationEvent:
    """One per-trade seller reputation record in a profile history."""

    tick: int
    value: float
    trade_tx_id: str
    original_value: Optional[float] = None  # set when amended by arbitration


@dataclass
class DissatisfactionFlag:
    seller_id: str
    buyer_id: str
    trade_tx_id: str
    evidence_hash: str
    tick: int


@dataclass
class ViolationNotice:
    participant_id: str
    trust: float
    trust_min: float
    tick: int


@dataclass
class TrustProfile:
    """Per-entity trust state; histories are kept per commodity type."""

    participant_id: str
    histories: Dict[str, List[ReputationEvent]] = field(default_factory=dict)
    reg_ratings: Dict[str, Tuple[float, int]] = field(default_factory=dict)
    successful_tx: Dict[str, int] = field(default_factory=dict)
    cached: Dict[str, Tuple[float, float, int]] = field(default_factory=dict)
    trust: float = 0.0

    def history(self, commodity_type: str) -> List[ReputationEvent]:
        return self.histories.setdefault(commodity_type, [])

    def append_event(self, commodity_type: str, event: ReputationEvent) -> None:
        hist = self.history(commodity_type)
        if hist and event.tick < hist[-1].tick:
            raise ValueError("reputation history ticks must not decrease")
        hist.append(event)


def forgetting_factor(age: int, decay_lambda: float) -> float:
    return math.exp(-decay_lambda * age)


def overall_reputation(history: Sequence[ReputationEvent], t_n: int,
                       decay_lambda: float) -> float:
    """Time-decayed aggregate reputation over a per-type event history."""
    total = 0.0
    for event in history:
        if event.tick > t_n:
            raise ValueError("event tick after evaluation time")
        total += event.value * forgetting_factor(t_n - event.tick, decay_lambda)
    return total


def feature_score_successful_tx(count: int) -> float:
    """Banded feature score for the successful-transaction count."""
    if count < 0:
        raise ValueError("count must be >= 0")
    for low, high, score in SUCCESSFUL_TX_BANDS:
        if count >= low and (high is None or count <= high):
            return score
    raise AssertionError("bands must be exhaustive")


def trust_score(reputation: float, features: Sequence[float],
                alpha: Sequence[float]) -> float:
    """Weighted combination alpha[0]*R + sum(alpha[i+1]*features[i])."""
    if len(alpha) != len(features) + 1:
        raise DimensionMismatch(
            f"alpha has {len(alpha)} entries for {len(features)} features"
        )
    total = alpha[0] * reputation
    for a, f in zip(alpha[1:], features):
        total += a * f
    return total


def evaluate_profile(profile: TrustProfile, commodity_type: str, t_n: int,
                     config: TrustConfig) -> Tuple[float, float]:
    """Compute (R, T) for one commodity type from scratch and cache them."""
    hist = profile.histories.get(commodity_type, [])
    rep = overall_reputation(hist, t_n, config.decay_lambda)
    f1 = feature_score_successful_tx(profile.successful_tx.get(commodity_type, 0))
    trust = trust_score(rep, [f1], config.alpha)
    profile.cached[commodity_type] = (rep, trust, t_n)
    profile.trust = trust
    return rep, trust


def check_trust_violation(profile: TrustProfile, config: TrustConfig,
                          tick: int) -> Optional[ViolationNotice]:
    """Notice iff the stored trust score is strictly below the minimum."""
    if profile.trust < config.trust_min:
        return ViolationNotice(
            participant_id=profile.participant_id,
            trust=profile.trust,
            trust_min=config.trust_min,
            tick=tick,
        )
    return None


def flag_conditions_hold(distinct_flagging_sellers: int, seller_flags: int,
                         trades_between: int) -> bool:
    """Arbitration fires only when several sellers flagged the buyer and the
    triggering seller has not flagged every trade with that buyer."""
    return distinct_flagging_sellers >= 2 and seller_flags < trades_between
