"""Ledger core: identity registry, ACL-gated transaction validation, the
hash-chained block store, and the state transitions applied at commit time.

Validation is a pure function of (transaction, state) returning a verdict;
rejections are verdicts, never exceptions. Commit hooks update ownership,
sensor histories, commodity scores, and trust profiles; in baseline mode
only ownership information is tracked.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from . import contracts as qc
from . import transactions as txn
from . import trust as tr
from .crypto import verify
from .encoding import ZERO_DIGEST, canonical_json, enc_bytes, enc_u64, sha256

# Participant roles
PRIMARY_PRODUCER = "PrimaryProducer"
LOGISTICS = "Logistics"
RETAILER = "Retailer"
REGULATOR = "Regulator"
GATEWAY_DEVICE = "GatewayDevice"
ADMIN = "Admin"
ROLES = (PRIMARY_PRODUCER, LOGISTICS, RETAILER, REGULATOR, GATEWAY_DEVICE, ADMIN)

ACTIVE = "Active"
REVOKED = "Revoked"

TRADING_ROLES = (PRIMARY_PRODUCER, LOGISTICS, RETAILER)

# Rejection reasons
R_REPLAY = "ReplayedTransaction"
R_UNKNOWN_PARTICIPANT = "UnknownParticipant"
R_UNKNOWN_COMMODITY = "UnknownCommodity"
R_UNKNOWN_CONTRACT = "UnknownContract"
R_DUPLICATE_COMMODITY = "DuplicateCommodity"
R_REVOKED = "ParticipantRevoked"
R_ACL_DENIED = "AclDenied"
R_BAD_SIGNATURE = "BadSignature"
R_SELF_TRADE = "SelfTrade"
R_NOT_OWNER = "NotOwner"
R_CHAIN_CLOSED = "ChainClosed"
R_BAD_RATING = "BadRating"
R_MALFORMED = "MalformedInput"


@dataclass
class Participant:
    id: str
    public_key: bytes
    role: str
    status: str = ACTIVE
    registered_at: int = 0


@dataclass
class ReadingRecord:
    tick: int
    value: float
    boundary_violation: bool = False
    damage_breach: bool = False


@dataclass
class Commodity:
    cid: str
    commodity_type: str
    contract_id: str
    owner: str
    data_hash: bytes
    created_at: int
    chain_complete: bool = False
    readings: List[ReadingRecord] = field(default_factory=list)
    segment_start: int = 0
    sensor_scores: List[Tuple[int, float]] = field(default_factory=list)
    owner_history: List[Tuple[int, str]] = field(default_factory=list)
    last_activity: int = 0
    overall_rating: Optional[float] = None
    unmonitored: bool = False

    def segment_readings(self) -> List[ReadingRecord]:
        return self.readings[self.segment_start:]


@dataclass(frozen=True)
class Block:
    height: int
    prev_hash: bytes
    body_hash: bytes
    timestamp: int
    tx_ids: Tuple[str, ...]

    def header_hash(self) -> bytes:
        return sha256(
            enc_u64(self.height) + self.prev_hash + self.body_hash
            + enc_u64(self.timestamp)
        )


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    reason: Optional[str] = None

    @staticmethod
    def accept() -> "Verdict":
        return Verdict(True)

    @staticmethod
    def reject(reason: str) -> "Verdict":
        return Verdict(False, reason)


@dataclass
class TradeRecord:
    """Committed-trade facts needed for queries and flag arbitration."""

    tx_id: str
    tick: int
    cid: str
    commodity_type: str
    seller: str
    buyer: str
    rep_sens: float = 0.0
    rep_trader: float = 0.0
    rep_reg: float = 0.0
    reg_issued_at: Optional[int] = None
    rep_seller: float = 0.0
    damage_breach: bool = False
    counted_success: bool = False
    flagged: bool = False
    reweighted: bool = False


# Role -> transaction kinds that role may submit; every other pair denies.
ACL_RULES: Dict[str, Tuple[str, ...]] = {
    PRIMARY_PRODUCER: ("create", "trade"),
    LOGISTICS: ("trade",),
    RETAILER: ("trade", "receipt"),
    REGULATOR: ("regulator_rating",),
    GATEWAY_DEVICE: ("sensory",),
    ADMIN: ("revoke", "resume"),
}


def acl_permits(role: str, tx_kind: str) -> bool:
    return tx_kind in ACL_RULES.get(role, ())


@dataclass
class LedgerState:
    """The full mutable network state; deep-copied for atomic block commits."""

    mode: str = "trustchain"  # or "baseline"
    participants: Dict[str, Participant] = field(default_factory=dict)
    commodities: Dict[str, Commodity] = field(default_factory=dict)
    contracts: qc.ContractRegistry = field(default_factory=qc.ContractRegistry)
    profiles: Dict[str, tr.TrustProfile] = field(default_factory=dict)
    blocks: List[Block] = field(default_factory=list)
    tx_store: Dict[str, bytes] = field(default_factory=dict)
    committed: set = field(default_factory=set)
    trade_records: Dict[str, TradeRecord] = field(default_factory=dict)
    pair_trades: Dict[Tuple[str, str], List[str]] = field(default_factory=dict)
    flags: Dict[str, tr.DissatisfactionFlag] = field(default_factory=dict)
    audit: List[dict] = field(default_factory=list)
    events: List[dict] = field(default_factory=list)
    publications: List[dict] = field(default_factory=list)
    payloads: Dict[str, bytes] = field(default_factory=dict)

    # -- helpers -----------------------------------------------------------

    def participant_by_key(self, public_key: bytes) -> Optional[Participant]:
        for p in self.participants.values():
            if p.public_key == public_key:
                return p
        return None

    def log(self, tick: int, kind: str, **payload) -> None:
        self.events.append({"tick": tick, "kind": kind, **payload})

    # -- validation (pure) -------------------------------------------------

    def validate_transaction(self, tx: txn.Transaction) -> Verdict:
        """ACL, signature, and referential-integrity checks; no mutation."""
        if txn.tx_id(tx) in self.committed:
            return Verdict.reject(R_REPLAY)
        handler = getattr(self, f"_validate_{tx.kind}")
        return handler(tx)

    def _active(self, pid: str) -> Tuple[Optional[Participant], Optional[str]]:
        p = self.participants.get(pid)
        if p is None:
            return None, R_UNKNOWN_PARTICIPANT
        if p.status != ACTIVE:
            return None, R_REVOKED
        return p, None

    def _validate_create(self, tx: txn.Create) -> Verdict:
        if not tx.cid or not tx.owner_id:
            return Verdict.reject(R_MALFORMED)
        owner, err = self._active(tx.owner_id)
        if err:
            return Verdict.reject(err)
        if not acl_permits(owner.role, tx.kind):
            return Verdict.reject(R_ACL_DENIED)
        if tx.cid in self.commodities:
            return Verdict.reject(R_DUPLICATE_COMMODITY)
        if self.contracts.get(tx.contract_id) is None:
            return Verdict.reject(R_UNKNOWN_CONTRACT)
        if tx.pub_key != owner.public_key:
            return Verdict.reject(R_BAD_SIGNATURE)
        if not verify(owner.public_key, txn.signing_payload(tx), tx.sig):
            return Verdict.reject(R_BAD_SIGNATURE)
        return Verdict.accept()

    def _validate_trade(self, tx: txn.Trade) -> Verdict:
        commodity = self.commodities.get(tx.cid)
        if commodity is None:
            return Verdict.reject(R_UNKNOWN_COMMODITY)
        if commodity.chain_complete:
            return Verdict.reject(R_CHAIN_CLOSED)
        seller = self.participant_by_key(tx.seller_pub)
        if seller is None:
            return Verdict.reject(R_BAD_SIGNATURE)
        buyer = self.participants.get(tx.buyer_id)
        if buyer is None:
            return Verdict.reject(R_UNKNOWN_PARTICIPANT)
        if seller.status != ACTIVE or buyer.status != ACTIVE:
            return Verdict.reject(R_REVOKED)
        if buyer.id == seller.id:
            return Verdict.reject(R_SELF_TRADE)
        if not acl_permits(seller.role, tx.kind) or buyer.role not in TRADING_ROLES:
            return Verdict.reject(R_ACL_DENIED)
        if commodity.owner != seller.id:
            return Verdict.reject(R_NOT_OWNER)
        if tx.buyer_pub != buyer.public_key:
            return Verdict.reject(R_BAD_SIGNATURE)
        if not 0.0 <= tx.buyer_rating <= 1.0:
            return Verdict.reject(R_BAD_RATING)
        payload = txn.signing_payload(tx)
        if not verify(seller.public_key, payload, tx.seller_sig):
            return Verdict.reject(R_BAD_SIGNATURE)
        if not verify(buyer.public_key, payload, tx.buyer_sig):
            return Verdict.reject(R_BAD_SIGNATURE)
        return Verdict.accept()

    def _validate_sensory(self, tx: txn.Sensory) -> Verdict:
        device, err = self._active(tx.device_id)
        if err:
            return Verdict.reject(err)
        if not acl_permits(device.role, tx.kind):
            return Verdict.reject(R_ACL_DENIED)
        if tx.cid not in self.commodities:
            return Verdict.reject(R_UNKNOWN_COMMODITY)
        if not verify(device.public_key, txn.signing_payload(tx), tx.device_sig):
            return Verdict.reject(R_BAD_SIGNATURE)
        return Verdict.accept()

    def _validate_regulator_rating(self, tx: txn.RegulatorRating) -> Verdict:
        regulator, err = self._active(tx.regulator_id)
        if err:
            return Verdict.reject(err)
        if not acl_permits(regulator.role, tx.kind):
            return Verdict.reject(R_ACL_DENIED)
        if tx.seller_id not in self.participants:
            return Verdict.reject(R_UNKNOWN_PARTICIPANT)
        if not 0.0 <= tx.rating <= 1.0:
            return Verdict.reject(R_BAD_RATING)
        if not verify(regulator.public_key, txn.signing_payload(tx), tx.sig):
            return Verdict.reject(R_BAD_SIGNATURE)
        return Verdict.accept()

    def _validate_receipt(self, tx: txn.Receipt) -> Verdict:
        commodity = self.commodities.get(tx.cid)
        if commodity is None:
            return Verdict.reject(R_UNKNOWN_COMMODITY)
        if commodity.chain_complete:
            return Verdict.reject(R_CHAIN_CLOSED)
        retailer = self.participant_by_key(tx.retailer_pub)
        if retailer is None:
            return Verdict.reject(R_BAD_SIGNATURE)
        if retailer.status != ACTIVE:
            return Verdict.reject(R_REVOKED)
        if not acl_permits(retailer.role, tx.kind):
            return Verdict.reject(R_ACL_DENIED)
        if commodity.owner != retailer.id:
            return Verdict.reject(R_NOT_OWNER)
        if not verify(retailer.public_key, txn.signing_payload(tx), tx.retailer_sig):
            return Verdict.reject(R_BAD_SIGNATURE)
        return Verdict.accept()

    def _validate_admin_tx(self, tx, want_status: str) -> Verdict:
        admin, err = self._active(tx.admin_id)
        if err:
            return Verdict.reject(err)
        if not acl_permits(admin.role, tx.kind):
            return Verdict.reject(R_ACL_DENIED)
        target = self.participants.get(tx.participant_id)
        if target is None:
            return Verdict.reject(R_UNKNOWN_PARTICIPANT)
        if target.status != want_status:
            return Verdict.reject(R_MALFORMED)
        if not verify(admin.public_key, txn.signing_payload(tx), tx.sig):
            return Verdict.reject(R_BAD_SIGNATURE)
        return Verdict.accept()

    def _validate_revoke(self, tx: txn.Revoke) -> Verdict:
        return self._validate_admin_tx(tx, ACTIVE)

    def _validate_resume(self, tx: txn.Resume) -> Verdict:
        return self._validate_admin_tx(tx, REVOKED)


def body_hash(tx_blobs: List[bytes]) -> bytes:
    data = b"".join(enc_bytes(blob) for blob in tx_blobs)
    return sha256(data)


def verify_chain(blocks: List[Block], tx_store: Dict[str, bytes]) -> bool:
    """True iff every block's prev_hash and body_hash recompute from genesis."""
    prev = ZERO_DIGEST
    for height, block in enumerate(blocks):
        if block.height != height or block.prev_hash != prev:
            return False
        blobs = []
        for tid in block.tx_ids:
            blob = tx_store.get(tid)
            if blob is None or sha256(blob).hex() != tid:
                return False
            blobs.append(blob)
        if body_hash(blobs) != block.body_hash:
            return False
        prev = block.header_hash()
    return True


def state_digest(state: LedgerState) -> str:
    """SHA-256 hex over the canonical JSON of the derived network state."""
    doc = {
        "mode": state.mode,
        "participants": {
            pid: [p.public_key.hex(), p.role, p.status, p.registered_at]
            for pid, p in state.participants.items()
        },
        "commodities": {
            c.cid: {
                "type": c.commodity_type,
                "contract": c.contract_id,
                "owner": c.owner,
                "data_hash": c.data_hash.hex(),
                "created_at": c.created_at,
                "chain_complete": c.chain_complete,
                "readings": [[r.tick, r.value, r.boundary_violation,
                              r.damage_breach] for r in c.readings],
                "scores": [[t, s] for t, s in c.sensor_scores],
                "owners": [[t, o] for t, o in c.owner_history],
                "overall": c.overall_rating,
                "unmonitored": c.unmonitored,
            }
            for c in state.commodities.values()
        },
        "contracts": {
            cid: [c.commodity_type, c.damage_low, c.boundary_low,
                  c.boundary_high, c.damage_high]
            for cid, c in state.contracts.contracts.items()
        },
        "profiles": {
            pid: {
                "histories": {
                    ct: [[e.tick, e.value, e.trade_tx_id, e.original_value]
                         for e in hist]
                    for ct, hist in profile.histories.items()
                },
                "reg": {ct: list(v) for ct, v in profile.reg_ratings.items()},
                "success": dict(profile.successful_tx),
                "trust": profile.trust,
            }
            for pid, profile in state.profiles.items()
        },
        "flags": sorted(state.flags),
        "height": len(state.blocks),
        "tip": state.blocks[-1].header_hash().hex() if state.blocks else None,
    }
    return sha256(canonical_json(doc)).hex()
