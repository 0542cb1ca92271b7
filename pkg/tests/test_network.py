import pytest

from trustchain import transactions as txn
from trustchain.errors import (
    DuplicateFlag,
    NoSuchTrade,
    NotPartyToTrade,
)
from trustchain.network import Network, Orderer

from conftest import FROZEN, Harness, keypair


def events_of(net, kind):
    return [e for e in net.state.events if e["kind"] == kind]


# -- commit-time triggers ---------------------------------------------------

def test_sensory_commit_records_and_warns(harness):
    net = harness.network
    net.append_block([harness.create_tx("farm", "c1", 1)], 1)
    net.append_block(
        [harness.sensory_tx("gw1", "c1", [-18.0, -20.0, -30.0], 3)], 3)
    records = net.state.commodities["c1"].readings
    assert [r.value for r in records] == [-18.0, -20.0, -30.0]
    assert [r.boundary_violation for r in records] == [False, True, False]
    assert [r.damage_breach for r in records] == [False, False, True]
    warnings = events_of(net, "warning")
    assert len(warnings) == 1 and warnings[0]["reading"] == -30.0


def test_trade_scores_segment_and_updates_profile(harness):
    net = harness.network
    net.append_block([harness.create_tx("farm", "c1", 1)], 1)
    net.append_block([harness.sensory_tx("gw1", "c1", [-18.0, -19.0], 2)], 2)
    net.append_block([harness.trade_tx("farm", "ship", "c1", 4, rating=0.8)], 4)
    c = net.state.commodities["c1"]
    assert c.owner == "ship"
    assert c.sensor_scores == [(4, 0.5)]  # 1 of 2 readings violating
    assert c.segment_start == 2  # next segment starts fresh
    profile = net.profile("farm")
    [event] = profile.histories["frozen"]
    # no regulator rating yet: w3 redistributed, rep = .5*sens + .5*rating
    assert event.value == pytest.approx(0.5 * 0.5 + 0.5 * 0.8)
    assert event.tick == 4
    assert profile.successful_tx["frozen"] == 1


def test_trade_with_damage_not_counted_successful(harness):
    net = harness.network
    net.append_block([harness.create_tx("farm", "c1", 1)], 1)
    net.append_block([harness.sensory_tx("gw1", "c1", [-30.0], 2)], 2)
    net.append_block([harness.trade_tx("farm", "ship", "c1", 3)], 3)
    profile = net.profile("farm")
    assert profile.successful_tx.get("frozen", 0) == 0
    assert len(profile.histories["frozen"]) == 1  # still a rep event


def test_unmonitored_segment_gets_neutral_score(harness):
    net = harness.network
    net.append_block([harness.create_tx("farm", "c1", 1)], 1)
    net.append_block([harness.trade_tx("farm", "ship", "c1", 2)], 2)
    assert net.state.commodities["c1"].sensor_scores == [(2, 0.5)]
    assert events_of(net, "unmonitored_segment")


def test_fresh_regulator_rating_enters_weighting(harness):
    net = harness.network
    net.append_block([harness.regulator_tx("fsa", "farm", "frozen", 0.9, 1)], 1)
    net.append_block([harness.create_tx("farm", "c1", 2)], 2)
    net.append_block([harness.sensory_tx("gw1", "c1", [-10.0], 3)], 3)
    net.append_block([harness.trade_tx("farm", "ship", "c1", 4, rating=0.6)], 4)
    [event] = net.profile("farm").histories["frozen"]
    assert event.value == pytest.approx((1.0 + 0.6 + 0.9) / 3)


def test_stale_regulator_rating_downweighted(harness):
    net = harness.network
    net.append_block(
        [harness.regulator_tx("fsa", "farm", "frozen", 0.9, 1, issued_at=1)], 1)
    net.append_block([harness.create_tx("farm", "c1", 2)], 2)
    net.append_block([harness.sensory_tx("gw1", "c1", [-10.0], 3)], 3)
    # 150 ticks later the inspection is past its period
    net.append_block([harness.trade_tx("farm", "ship", "c1", 150, rating=0.6)],
                     150)
    [event] = net.profile("farm").histories["frozen"]
    expected = (5 / 12) * 1.0 + (5 / 12) * 0.6 + (1 / 6) * 0.9
    assert event.value == pytest.approx(expected)


def test_receipt_computes_overall_rating(harness):
    net = harness.network
    net.append_block([harness.create_tx("farm", "c1", 1)], 1)
    net.append_block([harness.sensory_tx("gw1", "c1", [-10.0], 2)], 2)
    net.append_block([harness.trade_tx("farm", "ship", "c1", 3)], 3)
    net.append_block([harness.sensory_tx("gw1", "c1", [-10.0, -20.0], 4)], 4)
    net.append_block([harness.trade_tx("ship", "shop", "c1", 5)], 5)
    net.append_block([harness.receipt_tx("shop", "c1", 6)], 6)
    c = net.state.commodities["c1"]
    assert c.chain_complete
    # one score per trade segment: all-safe then 1-of-2 violating
    assert c.overall_rating == pytest.approx((1.0 + 0.5) / 2)
    assert not c.unmonitored


def test_baseline_mode_tracks_ownership_only():
    h = Harness(Network(mode="baseline", admin_id="admin",
                        admin_public_key=keypair("admin").public_bytes))
    h.network.instantiate_quality_contract(FROZEN)
    h.register("farm", "PrimaryProducer")
    h.register("shop", "Retailer")
    h.register("gw1", "GatewayDevice")
    net = h.network
    net.append_block([h.create_tx("farm", "c1", 1)], 1)
    net.append_block([h.sensory_tx("gw1", "c1", [-30.0], 2)], 2)
    net.append_block([h.trade_tx("farm", "shop", "c1", 3)], 3)
    net.append_block([h.receipt_tx("shop", "c1", 4)], 4)
    c = net.state.commodities["c1"]
    assert c.owner == "shop" and c.chain_complete
    assert c.sensor_scores == [] and c.overall_rating is None
    assert not events_of(net, "warning")
    assert net.profile("farm").histories == {}
    assert net.verify_chain()


def test_resume_reinitializes_trust(harness):
    net = harness.network
    net.profile("farm").trust = 0.9
    admin_key = harness.keys["admin"]
    rev = txn.Revoke(participant_id="farm", admin_id="admin", submitted_at=5)
    rev = txn.Revoke(participant_id="farm", admin_id="admin",
                     sig=admin_key.sign(txn.signing_payload(rev)),
                     submitted_at=5)
    net.append_block([rev], 5)
    assert net.state.participants["farm"].status == "Revoked"
    res = txn.Resume(participant_id="farm", admin_id="admin", submitted_at=9)
    res = txn.Resume(participant_id="farm", admin_id="admin",
                     sig=admin_key.sign(txn.signing_payload(res)),
                     submitted_at=9)
    net.append_block([res], 9)
    assert net.state.participants["farm"].status == "Active"
    assert net.profile("farm").trust == net.trust_config.trust_min


# -- dissatisfaction flags --------------------------------------------------

def unfair_trades(harness):
    """s1 makes three trades and s2 one, all to 'ship' with rating 0."""
    net = harness.network
    harness.register("s2", "PrimaryProducer")
    tids = {}
    tick = 1
    for seller, count in (("farm", 3), ("s2", 1)):
        for i in range(count):
            cid = f"{seller}-{i}"
            net.append_block([harness.create_tx(seller, cid, tick)], tick)
            tx = harness.trade_tx(seller, "ship", cid, tick + 1, rating=0.0)
            net.append_block([tx], tick + 1)
            tids.setdefault(seller, []).append(txn.tx_id(tx))
            tick += 2
    return tids


def test_flag_input_validation(harness):
    tids = unfair_trades(harness)
    net = harness.network
    with pytest.raises(NoSuchTrade):
        net.raise_dissatisfaction_flag("farm", "ship", "no-such", "ev", 20)
    with pytest.raises(NotPartyToTrade):
        net.raise_dissatisfaction_flag("s2", "ship", tids["farm"][0], "ev", 20)
    net.raise_dissatisfaction_flag("farm", "ship", tids["farm"][0], "ev", 20)
    with pytest.raises(DuplicateFlag):
        net.raise_dissatisfaction_flag("farm", "ship", tids["farm"][0], "ev", 21)


def test_flag_arbitration_and_reweight(harness):
    tids = unfair_trades(harness)
    net = harness.network
    # one flagging seller: no action yet
    _, action = net.raise_dissatisfaction_flag("farm", "ship",
                                               tids["farm"][0], "ev", 20)
    assert action is None
    # s2 flags its only trade: two distinct sellers now, but s2 flagged
    # every trade it had with the buyer, so nothing fires for s2
    _, action = net.raise_dissatisfaction_flag("s2", "ship",
                                               tids["s2"][0], "ev", 21)
    assert action is None
    before = net.profile("farm").successful_tx["frozen"]
    # farm's second flag: 2 distinct sellers and 2 of 3 trades flagged
    _, action = net.raise_dissatisfaction_flag("farm", "ship",
                                               tids["farm"][1], "ev", 22)
    assert action is not None
    assert sorted(action.trade_tx_ids) == sorted(tids["farm"][:2])
    profile = net.profile("farm")
    reweighted = [e for e in profile.histories["frozen"]
                  if e.original_value is not None]
    assert len(reweighted) == 2
    for event in reweighted:
        # buyer-rating weight halved: 0.25 of a 0.0 rating, rest on sensors
        assert event.original_value == pytest.approx(0.25)
        assert event.value == pytest.approx(0.375)
    assert profile.successful_tx["frozen"] == before - 2
    assert len(net.state.audit) == 2
    assert all(a["reason"] == "flag_reweight" for a in net.state.audit)
    # arbitration amends profiles, never the committed chain
    assert net.verify_chain()


def test_reweight_is_idempotent_per_trade(harness):
    tids = unfair_trades(harness)
    net = harness.network
    net.raise_dissatisfaction_flag("farm", "ship", tids["farm"][0], "ev", 20)
    net.raise_dissatisfaction_flag("s2", "ship", tids["s2"][0], "ev", 21)
    net.raise_dissatisfaction_flag("farm", "ship", tids["farm"][1], "ev", 22)
    audit_len = len(net.state.audit)
    # a later resolution pass must not double-apply earlier reweights
    action = net.resolve_flags("ship", "farm", 23)
    assert action is None
    assert len(net.state.audit) == audit_len


# -- orderer ----------------------------------------------------------------

def test_orderer_previews_verdicts_before_commit(harness):
    orderer = Orderer(harness.network, batch_size=10, batch_timeout=2)
    assert orderer.submit(harness.create_tx("farm", "c1", 1), 1).accepted
    # duplicate in the same open batch is rejected against the preview
    dup = harness.create_tx("farm", "c1", 1)
    assert orderer.submit(dup, 1).reason is not None
    assert not harness.network.state.blocks  # nothing sealed yet
    trade = harness.trade_tx("farm", "ship", "c1", 2)
    assert orderer.submit(trade, 2).accepted
    orderer.flush(3)
    assert len(harness.network.state.blocks) == 1
    assert harness.network.state.commodities["c1"].owner == "ship"


def test_orderer_seals_at_batch_size(harness):
    orderer = Orderer(harness.network, batch_size=2, batch_timeout=100)
    orderer.submit(harness.create_tx("farm", "a", 1), 1)
    assert not harness.network.state.blocks
    orderer.submit(harness.create_tx("farm", "b", 1), 1)
    assert len(harness.network.state.blocks) == 1


def test_orderer_seals_on_timeout(harness):
    orderer = Orderer(harness.network, batch_size=50, batch_timeout=2)
    orderer.submit(harness.create_tx("farm", "a", 1), 1)
    orderer.on_tick(2)
    assert not harness.network.state.blocks
    orderer.on_tick(3)
    assert len(harness.network.state.blocks) == 1
    assert orderer.flush(4) is None  # nothing pending
