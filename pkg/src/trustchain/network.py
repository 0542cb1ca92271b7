"""Network facade: participant registration, the single-writer commit path,
commit-time contract/trust hooks, flag arbitration, and state snapshots.

append_block validates and applies a batch on a copy of the state and only
adopts it when every transaction is valid, so a bad transaction can never
leave a half-applied block behind.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass
from typing import List, Optional, Tuple

from . import contracts as qc
from . import ledger as lg
from . import transactions as txn
from . import trust as tr
from .errors import (
    DuplicateFlag,
    DuplicateIdentity,
    InvalidTransactionInBatch,
    MalformedInput,
    NoSuchTrade,
    NotPartyToTrade,
    Unauthorized,
)


@dataclass
class ReweightAction:
    seller_id: str
    buyer_id: str
    trade_tx_ids: List[str]
    tick: int


class Network:
    """A single TrustChain (or baseline) network instance."""

    def __init__(self, trust_config: Optional[tr.TrustConfig] = None,
                 rating_config: Optional[qc.RatingConfig] = None,
                 mode: str = "trustchain",
                 admin_id: str = "admin",
                 admin_public_key: bytes = b""):
        if mode not in ("trustchain", "baseline"):
            raise MalformedInput(f"unknown mode {mode!r}")
        self.trust_config = trust_config or tr.TrustConfig()
        self.rating_config = rating_config or qc.RatingConfig()
        self.state = lg.LedgerState(mode=mode)
        # The business network administrator is the genesis identity.
        admin = lg.Participant(id=admin_id, public_key=admin_public_key,
                               role=lg.ADMIN, registered_at=0)
        self.state.participants[admin_id] = admin
        self.admin_id = admin_id

    @property
    def mode(self) -> str:
        return self.state.mode

    # -- registry ----------------------------------------------------------

    def register_participant(self, caller_id: str, participant_id: str,
                             role: str, public_key: bytes,
                             tick: int = 0) -> lg.Participant:
        """Register a new identity; only the admin (central authority) may."""
        caller = self.state.participants.get(caller_id)
        if caller is None or caller.role != lg.ADMIN:
            raise Unauthorized(f"{caller_id!r} is not an admin")
        if not participant_id:
            raise MalformedInput("participant id must be non-empty")
        if role not in lg.ROLES:
            raise MalformedInput(f"unknown role {role!r}")
        if participant_id in self.state.participants:
            raise DuplicateIdentity(participant_id)
        participant = lg.Participant(id=participant_id, public_key=public_key,
                                     role=role, registered_at=tick)
        self.state.participants[participant_id] = participant
        profile = tr.TrustProfile(participant_id=participant_id,
                                  trust=self.trust_config.trust_min)
        self.state.profiles[participant_id] = profile
        self.state.log(tick, "registered", id=participant_id, role=role)
        return participant

    def profile(self, participant_id: str) -> tr.TrustProfile:
        return self.state.profiles[participant_id]

    # -- contracts ---------------------------------------------------------

    def instantiate_quality_contract(self, contract: qc.QualityContract
                                     ) -> qc.QualityContract:
        return self.state.contracts.instantiate(contract)

    # -- commit path -------------------------------------------------------

    def validate_transaction(self, tx: txn.Transaction) -> lg.Verdict:
        return self.state.validate_transaction(tx)

    def append_block(self, txs: List[txn.Transaction],
                     tick: int = 0) -> lg.Block:
        """Validate and apply a batch atomically, then seal a block."""
        staged = copy.deepcopy(self.state)
        blobs = []
        ids = []
        for i, tx in enumerate(txs):
            verdict = staged.validate_transaction(tx)
            if not verdict.accepted:
                raise InvalidTransactionInBatch(i, txn.tx_id(tx), verdict.reason)
            # state transitions happen at the tx's logical time, not the
            # (possibly later) block-seal tick
            self._apply(staged, tx, tx.submitted_at)
            blob = txn.canonical_bytes(tx)
            tid = txn.tx_id(tx)
            staged.tx_store[tid] = blob
            staged.committed.add(tid)
            blobs.append(blob)
            ids.append(tid)
        prev = (staged.blocks[-1].header_hash() if staged.blocks
                else lg.ZERO_DIGEST)
        block = lg.Block(height=len(staged.blocks), prev_hash=prev,
                         body_hash=lg.body_hash(blobs), timestamp=tick,
                         tx_ids=tuple(ids))
        staged.blocks.append(block)
        self.state = staged
        return block

    def verify_chain(self) -> bool:
        return lg.verify_chain(self.state.blocks, self.state.tx_store)

    def state_digest(self) -> str:
        return lg.state_digest(self.state)

    # -- commit hooks ------------------------------------------------------

    def _apply(self, state: lg.LedgerState, tx: txn.Transaction,
               tick: int) -> None:
        getattr(self, f"_apply_{tx.kind}")(state, tx, tick)

    def _apply_create(self, state, tx: txn.Create, tick: int) -> None:
        contract = state.contracts.get(tx.contract_id)
        commodity = lg.Commodity(
            cid=tx.cid, commodity_type=contract.commodity_type,
            contract_id=tx.contract_id, owner=tx.owner_id,
            data_hash=tx.data_hash, created_at=tick, last_activity=tick,
            owner_history=[(tick, tx.owner_id)],
        )
        state.commodities[tx.cid] = commodity
        state.log(tick, "commodity_created", cid=tx.cid, owner=tx.owner_id)

    def _apply_sensory(self, state, tx: txn.Sensory, tick: int) -> None:
        commodity = state.commodities[tx.cid]
        contract = state.contracts.get(commodity.contract_id)
        for reading in tx.readings:
            record = lg.ReadingRecord(tick=tick, value=reading)
            if state.mode == "trustchain":
                record.damage_breach = contract.in_damage_zone(reading)
                record.boundary_violation = contract.in_boundary_violation(reading)
                if record.damage_breach:
                    state.log(tick, "warning", cid=tx.cid, reading=reading,
                              warning_kind="DamageBreach")
            commodity.readings.append(record)

    def _apply_trade(self, state, tx: txn.Trade, tick: int) -> None:
        commodity = state.commodities[tx.cid]
        seller = state.participant_by_key(tx.seller_pub)
        buyer_id = tx.buyer_id
        if state.mode == "trustchain":
            self._score_trade(state, tx, commodity, seller.id, tick)
        commodity.owner = buyer_id
        commodity.owner_history.append((tick, buyer_id))
        commodity.last_activity = tick
        state.log(tick, "trade", cid=tx.cid, seller=seller.id, buyer=buyer_id)

    def _score_trade(self, state, tx: txn.Trade, commodity: lg.Commodity,
                     seller_id: str, tick: int) -> None:
        contract = state.contracts.get(commodity.contract_id)
        segment = commodity.segment_readings()
        damage = any(r.damage_breach for r in segment)
        if segment:
            rep_sens = qc.commodity_score(contract,
                                          [r.value for r in segment])
        else:
            rep_sens = self.rating_config.neutral_score
            state.log(tick, "unmonitored_segment", cid=tx.cid)
        commodity.sensor_scores.append((tick, rep_sens))
        commodity.segment_start = len(commodity.readings)

        ctype = commodity.commodity_type
        profile = state.profiles[seller_id]
        reg = profile.reg_ratings.get(ctype)
        rep_reg, reg_at = (reg if reg else
                           (self.rating_config.neutral_score, None))
        inputs = qc.TradeRatingInputs(
            rep_sens=rep_sens, rep_trader=tx.buyer_rating, rep_reg=rep_reg,
            weights=self.rating_config.weights, reg_issued_at=reg_at,
        )
        rep_seller = qc.compute_seller_rep(
            inputs, tick, self.rating_config.inspection_period,
            self.rating_config.staleness_gamma,
        )
        tid = txn.tx_id(tx)
        profile.append_event(ctype, tr.ReputationEvent(
            tick=tick, value=rep_seller, trade_tx_id=tid))
        counted = not damage
        if counted:
            profile.successful_tx[ctype] = profile.successful_tx.get(ctype, 0) + 1
        record = lg.TradeRecord(
            tx_id=tid, tick=tick, cid=tx.cid, commodity_type=ctype,
            seller=seller_id, buyer=tx.buyer_id, rep_sens=rep_sens,
            rep_trader=tx.buyer_rating, rep_reg=rep_reg, reg_issued_at=reg_at,
            rep_seller=rep_seller, damage_breach=damage,
            counted_success=counted,
        )
        state.trade_records[tid] = record
        state.pair_trades.setdefault((seller_id, tx.buyer_id), []).append(tid)
        state.log(tick, "rep_seller", seller=seller_id, commodity_type=ctype,
                  value=rep_seller, trade=tid)

    def _apply_regulator_rating(self, state, tx: txn.RegulatorRating,
                                tick: int) -> None:
        if state.mode != "trustchain":
            return
        profile = state.profiles[tx.seller_id]
        profile.reg_ratings[tx.commodity_type] = (tx.rating, tx.issued_at)
        state.log(tick, "regulator_rating", seller=tx.seller_id,
                  commodity_type=tx.commodity_type, rating=tx.rating)

    def _apply_receipt(self, state, tx: txn.Receipt, tick: int) -> None:
        commodity = state.commodities[tx.cid]
        commodity.chain_complete = True
        commodity.last_activity = tick
        if state.mode == "trustchain":
            scores = [s for _, s in commodity.sensor_scores]
            rating, unmonitored = qc.overall_commodity_rating(
                scores, self.rating_config.neutral_score)
            commodity.overall_rating = rating
            commodity.unmonitored = unmonitored
            state.log(tick, "overall_rating", cid=tx.cid, rating=rating,
                      unmonitored=unmonitored)
        state.log(tick, "chain_complete", cid=tx.cid)

    def _apply_revoke(self, state, tx: txn.Revoke, tick: int) -> None:
        state.participants[tx.participant_id].status = lg.REVOKED
        state.log(tick, "revoked", id=tx.participant_id)

    def _apply_resume(self, state, tx: txn.Resume, tick: int) -> None:
        state.participants[tx.participant_id].status = lg.ACTIVE
        profile = state.profiles.get(tx.participant_id)
        if profile is not None:
            # re-admission mirrors first registration
            profile.trust = self.trust_config.trust_min
        state.log(tick, "resumed", id=tx.participant_id)

    # -- dissatisfaction flags ---------------------------------------------

    def raise_dissatisfaction_flag(self, seller_id: str, buyer_id: str,
                                   trade_tx_id: str, evidence_hash: str,
                                   tick: int) -> Tuple[tr.DissatisfactionFlag,
                                                       Optional[ReweightAction]]:
        """Record a seller's objection to a buyer rating and arbitrate."""
        record = self.state.trade_records.get(trade_tx_id)
        if record is None:
            raise NoSuchTrade(trade_tx_id)
        if record.seller != seller_id or record.buyer != buyer_id:
            raise NotPartyToTrade(f"{seller_id} was not the seller of "
                                  f"{trade_tx_id}")
        if trade_tx_id in self.state.flags:
            raise DuplicateFlag(trade_tx_id)
        flag = tr.DissatisfactionFlag(
            seller_id=seller_id, buyer_id=buyer_id, trade_tx_id=trade_tx_id,
            evidence_hash=evidence_hash, tick=tick,
        )
        self.state.flags[trade_tx_id] = flag
        record.flagged = True
        self.state.log(tick, "flag", seller=seller_id, buyer=buyer_id,
                       trade=trade_tx_id)
        return flag, self.resolve_flags(buyer_id, seller_id, tick)

    def resolve_flags(self, buyer_id: str, triggering_seller: str,
                      tick: int) -> Optional[ReweightAction]:
        """Reweight the buyer rating of the seller's flagged trades when both
        arbitration conditions hold; otherwise no action."""
        state = self.state
        flaggers = {f.seller_id for f in state.flags.values()
                    if f.buyer_id == buyer_id}
        pair = state.pair_trades.get((triggering_seller, buyer_id), [])
        seller_flags = sum(1 for tid in pair if state.trade_records[tid].flagged)
        if not tr.flag_conditions_hold(len(flaggers), seller_flags, len(pair)):
            return None
        affected = []
        for tid in pair:
            record = state.trade_records[tid]
            if not record.flagged or record.reweighted:
                continue
            weights = qc.apply_staleness(
                self.rating_config.weights, record.reg_issued_at, record.tick,
                self.rating_config.inspection_period,
                self.rating_config.staleness_gamma,
            )
            weights = qc.reduce_weight(weights, 1, self.rating_config.flag_gamma)
            new_value = (weights[0] * record.rep_sens
                         + weights[1] * record.rep_trader
                         + weights[2] * record.rep_reg)
            profile = state.profiles[record.seller]
            for event in profile.history(record.commodity_type):
                if event.trade_tx_id == tid:
                    state.audit.append({
                        "tick": tick, "trade": tid, "seller": record.seller,
                        "old": event.value, "new": new_value,
                        "reason": "flag_reweight",
                    })
                    event.original_value = event.value
                    event.value = new_value
                    break
            record.rep_seller = new_value
            record.reweighted = True
            if record.counted_success:
                record.counted_success = False
                counts = profile.successful_tx
                counts[record.commodity_type] = max(
                    0, counts.get(record.commodity_type, 0) - 1)
            affected.append(tid)
        if not affected:
            return None
        seller_profile = state.profiles[triggering_seller]
        for ctype in {state.trade_records[t].commodity_type for t in affected}:
            tr.evaluate_profile(seller_profile, ctype, tick, self.trust_config)
        action = ReweightAction(seller_id=triggering_seller, buyer_id=buyer_id,
                                trade_tx_ids=affected, tick=tick)
        state.log(tick, "reweight", seller=triggering_seller, buyer=buyer_id,
                  trades=affected)
        return action


class Orderer:
    """Solo-orderer batching: seal a block after B transactions or when the
    batch has been open for the timeout, whichever comes first."""

    def __init__(self, network: Network, batch_size: int = 50,
                 batch_timeout: int = 2):
        self.network = network
        self.batch_size = batch_size
        self.batch_timeout = batch_timeout
        self._batch: List[txn.Transaction] = []
        self._preview: Optional[Network] = None
        self._opened_at: Optional[int] = None

    def _ensure_preview(self) -> Network:
        if self._preview is None:
            self._preview = copy.deepcopy(self.network)
        return self._preview

    def submit(self, tx: txn.Transaction, tick: int) -> lg.Verdict:
        """Validate against the pending view; stage the tx when accepted."""
        preview = self._ensure_preview()
        verdict = preview.validate_transaction(tx)
        if verdict.accepted:
            preview.append_block([tx], tick)
            self._batch.append(tx)
            if self._opened_at is None:
                self._opened_at = tick
            if len(self._batch) >= self.batch_size:
                self.flush(tick)
        return verdict

    def on_tick(self, tick: int) -> None:
        if (self._opened_at is not None
                and tick - self._opened_at >= self.batch_timeout):
            self.flush(tick)

    def flush(self, tick: int) -> Optional[lg.Block]:
        if not self._batch:
            self._preview = None
            self._opened_at = None
            return None
        block = self.network.append_block(self._batch, tick)
        self._batch = []
        self._preview = None
        self._opened_at = None
        return block
