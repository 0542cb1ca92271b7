"""Application layer: the query surface, trust recomputation requests,
rewards publication, and the revoke/resume penalty transactions.

Queries are plain dicts ({"kind": ..., **params}) so the same shapes flow
through the HTTP service, the CLI, and scenario files unchanged.
"""

from __future__ import annotations

from typing import Optional, Tuple

from . import ledger as lg
from . import transactions as txn
from . import trust as tr
from .crypto import KeyPair
from .errors import (
    AlreadyRevoked,
    ChainIncomplete,
    NotFound,
    NotRevoked,
    Unauthorized,
    UnknownSeller,
)
from .network import Network

QUERY_KINDS = (
    "CommoditySensorHistory",
    "ProvenanceTrail",
    "IncompleteChains",
    "TopTraders",
    "RevokedList",
    "TraderTrust",
    "OverallCommodityRating",
)

# Queries an unprivileged consumer may issue; everything else needs an
# admin or regulator.
CONSUMER_QUERIES = ("OverallCommodityRating", "CommoditySensorHistory")


def _authorize(network: Network, issuer: Optional[str], kind: str) -> None:
    if kind in CONSUMER_QUERIES:
        return
    participant = network.state.participants.get(issuer or "")
    if participant is None or participant.role not in (lg.ADMIN, lg.REGULATOR):
        raise Unauthorized(f"{issuer!r} may not issue {kind}")


def _commodity(network: Network, cid: str) -> lg.Commodity:
    commodity = network.state.commodities.get(cid)
    if commodity is None:
        raise NotFound(f"unknown commodity {cid!r}")
    return commodity


def query(network: Network, q: dict, issuer: Optional[str] = None,
          now: int = 0) -> dict:
    """Evaluate a read query against the current snapshot."""
    kind = q.get("kind")
    if kind not in QUERY_KINDS:
        raise NotFound(f"unknown query kind {kind!r}")
    _authorize(network, issuer, kind)
    state = network.state

    if kind == "CommoditySensorHistory":
        c = _commodity(network, q["cid"])
        return {
            "cid": c.cid,
            "readings": [[r.tick, r.value, r.boundary_violation,
                          r.damage_breach] for r in c.readings],
            "scores": [[t, s] for t, s in c.sensor_scores],
        }

    if kind == "ProvenanceTrail":
        c = _commodity(network, q["cid"])
        return {"cid": c.cid,
                "owners": [[t, o] for t, o in c.owner_history]}

    if kind == "OverallCommodityRating":
        c = _commodity(network, q["cid"])
        if not c.chain_complete:
            raise ChainIncomplete(c.cid)
        return {"cid": c.cid, "rating": c.overall_rating,
                "unmonitored": c.unmonitored}

    if kind == "IncompleteChains":
        older_than = int(q.get("older_than", 0))
        stale = [
            c.cid for c in state.commodities.values()
            if not c.chain_complete and now - c.last_activity >= older_than
        ]
        return {"cids": sorted(stale)}

    if kind == "TopTraders":
        k = int(q.get("k", 0))
        ctype = q.get("commodity_type", "")
        ranked = []
        for pid in sorted(state.profiles):
            profile = state.profiles[pid]
            if ctype not in profile.histories:
                continue
            rep, trust = tr.evaluate_profile(profile, ctype, now,
                                             network.trust_config)
            ranked.append({"id": pid, "reputation": rep, "trust": trust})
        ranked.sort(key=lambda r: (-r["trust"], r["id"]))
        return {"commodity_type": ctype, "traders": ranked[:k]}

    if kind == "RevokedList":
        revoked = sorted(p.id for p in state.participants.values()
                         if p.status == lg.REVOKED)
        return {"revoked": revoked}

    if kind == "TraderTrust":
        pid = q["id"]
        profile = state.profiles.get(pid)
        if profile is None:
            raise NotFound(f"unknown trader {pid!r}")
        ctype = q.get("commodity_type", "")
        cached = profile.cached.get(ctype)
        return {
            "id": pid,
            "trust": profile.trust,
            "cached": list(cached) if cached else None,
            "events": len(profile.histories.get(ctype, [])),
        }

    raise AssertionError("unreachable")


def request_trust_recompute(network: Network, issuer: str, seller_id: str,
                            commodity_type: str,
                            t_n: int) -> Tuple[float, float]:
    """Admin/regulator request: recompute (R, T) from the profile history,
    store both, and log a violation notice when T drops below the minimum."""
    participant = network.state.participants.get(issuer)
    if participant is None or participant.role not in (lg.ADMIN, lg.REGULATOR):
        raise Unauthorized(f"{issuer!r} may not request recompute")
    profile = network.state.profiles.get(seller_id)
    if profile is None:
        raise UnknownSeller(seller_id)
    rep, trust = tr.evaluate_profile(profile, commodity_type, t_n,
                                     network.trust_config)
    network.state.log(t_n, "trust_recompute", seller=seller_id,
                      commodity_type=commodity_type, reputation=rep,
                      trust=trust)
    notice = tr.check_trust_violation(profile, network.trust_config, t_n)
    if notice is not None:
        network.state.log(t_n, "trust_violation", id=seller_id,
                          trust=notice.trust, trust_min=notice.trust_min)
    return rep, trust


def _admin_tx(network: Network, admin_id: str, admin_key: KeyPair,
              tx_cls, participant_id: str, tick: int):
    tx = tx_cls(participant_id=participant_id, admin_id=admin_id,
                submitted_at=tick)
    sig = admin_key.sign(txn.signing_payload(tx))
    tx = tx_cls(participant_id=participant_id, admin_id=admin_id,
                sig=sig, submitted_at=tick)
    network.append_block([tx], tick)
    return tx


def revoke(network: Network, admin_id: str, admin_key: KeyPair,
           participant_id: str, tick: int) -> txn.Revoke:
    """Commit a revoke transaction for an active participant."""
    _require_admin(network, admin_id)
    target = network.state.participants.get(participant_id)
    if target is None:
        raise NotFound(participant_id)
    if target.status == lg.REVOKED:
        raise AlreadyRevoked(participant_id)
    return _admin_tx(network, admin_id, admin_key, txn.Revoke,
                     participant_id, tick)


def resume(network: Network, admin_id: str, admin_key: KeyPair,
           participant_id: str, tick: int) -> txn.Resume:
    """Commit a resume transaction for a revoked participant."""
    _require_admin(network, admin_id)
    target = network.state.participants.get(participant_id)
    if target is None:
        raise NotFound(participant_id)
    if target.status != lg.REVOKED:
        raise NotRevoked(participant_id)
    return _admin_tx(network, admin_id, admin_key, txn.Resume,
                     participant_id, tick)


def _require_admin(network: Network, admin_id: str) -> None:
    participant = network.state.participants.get(admin_id)
    if participant is None or participant.role != lg.ADMIN:
        raise Unauthorized(f"{admin_id!r} is not an admin")


def publish_rewards(network: Network, k: int, tick: int) -> dict:
    """Publish the top-k traders by trust score per commodity type; ties
    break on lexicographic id."""
    by_type = {}
    ctypes = set()
    for profile in network.state.profiles.values():
        ctypes.update(profile.histories)
    for ctype in sorted(ctypes):
        result = query(network, {"kind": "TopTraders", "commodity_type": ctype,
                                 "k": k}, issuer=network.admin_id, now=tick)
        by_type[ctype] = result["traders"]
    record = {"tick": tick, "kind": "HighTrustList", "payload": by_type}
    network.state.publications.append(record)
    network.state.log(tick, "publication", publication_kind="HighTrustList")
    return record


def publish_revoked_list(network: Network, tick: int) -> dict:
    revoked = query(network, {"kind": "RevokedList"},
                    issuer=network.admin_id, now=tick)["revoked"]
    record = {"tick": tick, "kind": "RevokedList", "payload": revoked}
    network.state.publications.append(record)
    network.state.log(tick, "publication", publication_kind="RevokedList")
    return record
