import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trustchain import trust as tr
from trustchain.errors import DimensionMismatch


def ev(tick, value):
    return tr.ReputationEvent(tick=tick, value=value, trade_tx_id=f"t{tick}")


def test_forgetting_factor():
    assert tr.forgetting_factor(0, 0.05) == 1.0
    assert tr.forgetting_factor(10, 0.05) == pytest.approx(math.exp(-0.5))


def test_overall_reputation_halving():
    # with lambda = ln 2, each tick of age halves an event's contribution
    hist = [ev(0, 1.0), ev(1, 1.0)]
    rep = tr.overall_reputation(hist, 1, math.log(2))
    assert rep == pytest.approx(1.5)


def test_overall_reputation_no_decay():
    hist = [ev(0, 0.4), ev(5, 0.6)]
    assert tr.overall_reputation(hist, 5, 0.0) == pytest.approx(1.0)


def test_overall_reputation_rejects_future_events():
    with pytest.raises(ValueError):
        tr.overall_reputation([ev(10, 1.0)], 5, 0.05)


def test_successful_tx_bands():
    assert tr.feature_score_successful_tx(0) == -1.0
    assert tr.feature_score_successful_tx(2) == 0.5
    assert tr.feature_score_successful_tx(5) == 1.5
    assert tr.feature_score_successful_tx(8) == 2.0


def test_successful_tx_bands_exhaustive():
    expected = {0: -1.0}
    expected.update({n: 0.5 for n in range(1, 4)})
    expected.update({n: 1.5 for n in range(4, 6)})
    expected.update({n: 2.0 for n in range(6, 101)})
    for n in range(101):
        assert tr.feature_score_successful_tx(n) == expected[n]
    with pytest.raises(ValueError):
        tr.feature_score_successful_tx(-1)


def test_trust_score_linear_combination():
    assert tr.trust_score(0.8, [-1.0], (1.0, 0.1)) == pytest.approx(0.7)
    assert tr.trust_score(0.8, [2.0], (1.0, 0.1)) == pytest.approx(1.0)
    assert tr.trust_score(0.5, [1.0, 2.0], (1.0, 0.2, 0.1)) == pytest.approx(0.9)


def test_trust_score_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        tr.trust_score(0.5, [1.0, 2.0], (1.0, 0.1))


def test_evaluate_profile_caches():
    config = tr.TrustConfig()
    profile = tr.TrustProfile(participant_id="farm")
    profile.append_event("frozen", ev(0, 0.8))
    profile.successful_tx["frozen"] = 1
    rep, trust = tr.evaluate_profile(profile, "frozen", 10, config)
    assert rep == pytest.approx(0.8 * math.exp(-0.5))
    assert trust == pytest.approx(rep + 0.1 * 0.5)
    assert profile.cached["frozen"] == (rep, trust, 10)
    assert profile.trust == trust


def test_history_ticks_must_not_decrease():
    profile = tr.TrustProfile(participant_id="farm")
    profile.append_event("frozen", ev(5, 0.5))
    with pytest.raises(ValueError):
        profile.append_event("frozen", ev(3, 0.5))


def test_trust_violation_is_strict():
    config = tr.TrustConfig(trust_min=0.3)
    profile = tr.TrustProfile(participant_id="p", trust=0.3)
    assert tr.check_trust_violation(profile, config, 1) is None
    profile.trust = 0.3 - 1e-9
    notice = tr.check_trust_violation(profile, config, 1)
    assert notice is not None and notice.participant_id == "p"


def test_flag_conditions():
    assert tr.flag_conditions_hold(2, 1, 3)
    assert not tr.flag_conditions_hold(1, 1, 3)   # only one flagging seller
    assert not tr.flag_conditions_hold(2, 3, 3)   # flagged every trade
    assert not tr.flag_conditions_hold(2, 1, 1)


history_strategy = st.lists(
    st.tuples(st.integers(0, 200), st.floats(0.0, 1.0)), max_size=30
).map(lambda pairs: [ev(t, v) for t, v in sorted(pairs)])


@settings(max_examples=200)
@given(history_strategy, st.integers(0, 100), st.floats(0.001, 1.0))
def test_reputation_matches_brute_force(pairs, extra, lam):
    t_n = (pairs[-1].tick if pairs else 0) + extra
    expected = sum(e.value * math.exp(-lam * (t_n - e.tick)) for e in pairs)
    got = tr.overall_reputation(pairs, t_n, lam)
    assert got == pytest.approx(expected, rel=1e-12, abs=1e-12)


@settings(max_examples=200)
@given(history_strategy, st.integers(1, 50), st.floats(0.01, 1.0))
def test_amnesia_monotone_decay(pairs, dt, lam):
    """With no new events, aged reputation is the old value scaled by the
    forgetting factor — so it only decays."""
    t0 = (pairs[-1].tick if pairs else 0) + 1
    r0 = tr.overall_reputation(pairs, t0, lam)
    r1 = tr.overall_reputation(pairs, t0 + dt, lam)
    assert r1 == pytest.approx(r0 * math.exp(-lam * dt), rel=1e-9, abs=1e-12)
    assert abs(r1) <= abs(r0) + 1e-12
