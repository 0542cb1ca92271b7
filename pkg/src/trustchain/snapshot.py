"""State snapshot export/import as a structured JSON document.

A snapshot carries the full derived state plus the block chain and raw
transaction bytes, so a loaded snapshot supports both queries and full
chain re-verification.
"""

from __future__ import annotations

import json

from . import ledger as lg
from . import trust as tr
from .contracts import QualityContract, RatingConfig
from .network import Network
from .trust import TrustConfig

SNAPSHOT_VERSION = 1


def export_snapshot(network: Network) -> dict:
    state = network.state
    return {
        "version": SNAPSHOT_VERSION,
        "mode": state.mode,
        "admin_id": network.admin_id,
        "trust_config": {
            "decay_lambda": network.trust_config.decay_lambda,
            "alpha": list(network.trust_config.alpha),
            "trust_min": network.trust_config.trust_min,
            "recompute_period": network.trust_config.recompute_period,
        },
        "rating_config": {
            "weights": list(network.rating_config.weights),
            "staleness_gamma": network.rating_config.staleness_gamma,
            "inspection_period": network.rating_config.inspection_period,
            "neutral_score": network.rating_config.neutral_score,
            "flag_gamma": network.rating_config.flag_gamma,
        },
        "participants": [
            {"id": p.id, "public_key": p.public_key.hex(), "role": p.role,
             "status": p.status, "registered_at": p.registered_at}
            for p in state.participants.values()
        ],
        "contracts": [
            {"contract_id": c.contract_id, "commodity_type": c.commodity_type,
             "damage_low": c.damage_low, "boundary_low": c.boundary_low,
             "boundary_high": c.boundary_high, "damage_high": c.damage_high}
            for c in state.contracts.contracts.values()
        ],
        "commodities": [
            {
                "cid": c.cid, "commodity_type": c.commodity_type,
                "contract_id": c.contract_id, "owner": c.owner,
                "data_hash": c.data_hash.hex(), "created_at": c.created_at,
                "chain_complete": c.chain_complete,
                "readings": [[r.tick, r.value, r.boundary_violation,
                              r.damage_breach] for r in c.readings],
                "segment_start": c.segment_start,
                "sensor_scores": [[t, s] for t, s in c.sensor_scores],
                "owner_history": [[t, o] for t, o in c.owner_history],
                "last_activity": c.last_activity,
                "overall_rating": c.overall_rating,
                "unmonitored": c.unmonitored,
            }
            for c in state.commodities.values()
        ],
        "profiles": [
            {
                "participant_id": p.participant_id,
                "histories": {
                    ct: [[e.tick, e.value, e.trade_tx_id, e.original_value]
                         for e in hist]
                    for ct, hist in p.histories.items()
                },
                "reg_ratings": {ct: list(v) for ct, v in p.reg_ratings.items()},
                "successful_tx": dict(p.successful_tx),
                "trust": p.trust,
            }
            for p in state.profiles.values()
        ],
        "blocks": [
            {"height": b.height, "prev_hash": b.prev_hash.hex(),
             "body_hash": b.body_hash.hex(), "timestamp": b.timestamp,
             "tx_ids": list(b.tx_ids)}
            for b in state.blocks
        ],
        "txs": {tid: blob.hex() for tid, blob in state.tx_store.items()},
        "flags": [
            {"seller_id": f.seller_id, "buyer_id": f.buyer_id,
             "trade_tx_id": f.trade_tx_id, "evidence_hash": f.evidence_hash,
             "tick": f.tick}
            for f in state.flags.values()
        ],
        "events": list(state.events),
        "publications": list(state.publications),
        "audit": list(state.audit),
    }


def load_snapshot(doc: dict) -> Network:
    """Rebuild a queryable network from a snapshot document."""
    if doc.get("version") != SNAPSHOT_VERSION:
        raise ValueError(f"unsupported snapshot version {doc.get('version')!r}")
    trust_config = TrustConfig(
        decay_lambda=doc["trust_config"]["decay_lambda"],
        alpha=tuple(doc["trust_config"]["alpha"]),
        trust_min=doc["trust_config"]["trust_min"],
        recompute_period=doc["trust_config"]["recompute_period"],
    )
    rating_config = RatingConfig(
        weights=tuple(doc["rating_config"]["weights"]),
        staleness_gamma=doc["rating_config"]["staleness_gamma"],
        inspection_period=doc["rating_config"]["inspection_period"],
        neutral_score=doc["rating_config"]["neutral_score"],
        flag_gamma=doc["rating_config"]["flag_gamma"],
    )
    network = Network(trust_config=trust_config, rating_config=rating_config,
                      mode=doc["mode"], admin_id=doc["admin_id"])
    state = network.state
    state.participants.clear()
    for p in doc["participants"]:
        state.participants[p["id"]] = lg.Participant(
            id=p["id"], public_key=bytes.fromhex(p["public_key"]),
            role=p["role"], status=p["status"],
            registered_at=p["registered_at"],
        )
    for c in doc["contracts"]:
        state.contracts.instantiate(QualityContract(**c))
    for c in doc["commodities"]:
        state.commodities[c["cid"]] = lg.Commodity(
            cid=c["cid"], commodity_type=c["commodity_type"],
            contract_id=c["contract_id"], owner=c["owner"],
            data_hash=bytes.fromhex(c["data_hash"]),
            created_at=c["created_at"], chain_complete=c["chain_complete"],
            readings=[lg.ReadingRecord(tick=t, value=v, boundary_violation=b,
                                       damage_breach=d)
                      for t, v, b, d in c["readings"]],
            segment_start=c["segment_start"],
            sensor_scores=[(t, s) for t, s in c["sensor_scores"]],
            owner_history=[(t, o) for t, o in c["owner_history"]],
            last_activity=c["last_activity"],
            overall_rating=c["overall_rating"], unmonitored=c["unmonitored"],
        )
    for p in doc["profiles"]:
        profile = tr.TrustProfile(participant_id=p["participant_id"],
                                  trust=p["trust"])
        for ct, hist in p["histories"].items():
            profile.histories[ct] = [
                tr.ReputationEvent(tick=t, value=v, trade_tx_id=tid,
                                   original_value=orig)
                for t, v, tid, orig in hist
            ]
        profile.reg_ratings = {ct: tuple(v) for ct, v in
                               p["reg_ratings"].items()}
        profile.successful_tx = dict(p["successful_tx"])
        state.profiles[p["participant_id"]] = profile
    for b in doc["blocks"]:
        state.blocks.append(lg.Block(
            height=b["height"], prev_hash=bytes.fromhex(b["prev_hash"]),
            body_hash=bytes.fromhex(b["body_hash"]), timestamp=b["timestamp"],
            tx_ids=tuple(b["tx_ids"]),
        ))
    state.tx_store = {tid: bytes.fromhex(blob)
                      for tid, blob in doc["txs"].items()}
    state.committed = set(state.tx_store)
    for f in doc["flags"]:
        state.flags[f["trade_tx_id"]] = tr.DissatisfactionFlag(**f)
    state.events = list(doc["events"])
    state.publications = list(doc["publications"])
    state.audit = list(doc["audit"])
    return network


def dumps(network: Network) -> str:
    return json.dumps(export_snapshot(network), indent=2, sort_keys=True)


def loads(text: str) -> Network:
    return load_snapshot(json.loads(text))
