"""Scenario files and the end-to-end replay runner.

A scenario is a versioned YAML document: participants (with deterministic
key seeds), quality contracts, config overrides, a tick-ordered timeline
of actions, and optional post-run assertions. The replay drives the full
stack (registration, the batching orderer, contracts, trust, application
queries) and produces a reproducible RunReport. The schema is documented
in docs/FORMATS.md.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from importlib import resources
from typing import Dict, List, Optional

import yaml

from . import application as app
from . import transactions as txn
from .contracts import QualityContract, RatingConfig
from .crypto import KeyPair
from .errors import ScenarioAssertionError, ScenarioParseError, TrustChainError
from .network import Network, Orderer
from .trust import TrustConfig

SCHEMA_VERSION = 1

ACTIONS = ("register", "create", "sense", "trade", "regulate", "receipt",
           "flag", "revoke", "resume", "query", "recompute",
           "publish_rewards")


@dataclass
class Scenario:
    name: str
    participants: List[dict]
    contracts: List[dict]
    timeline: List[dict]
    assertions: List[dict] = field(default_factory=list)
    trust_config: TrustConfig = field(default_factory=TrustConfig)
    rating_config: RatingConfig = field(default_factory=RatingConfig)
    batch_size: int = 50
    batch_timeout: int = 2
    mode: str = "trustchain"
    penalty_period: Optional[int] = None


@dataclass
class RunReport:
    scenario: str
    seed: int
    state_digest: str
    chain_valid: bool
    events: List[dict]
    verdicts: List[dict]
    assertion_results: List[dict]
    publications: List[dict]
    final_trust: Dict[str, dict]
    query_results: List[dict]

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "seed": self.seed,
            "state_digest": self.state_digest,
            "chain_valid": self.chain_valid,
            "events": self.events,
            "verdicts": self.verdicts,
            "assertion_results": self.assertion_results,
            "publications": self.publications,
            "final_trust": self.final_trust,
            "query_results": self.query_results,
        }


def parse_scenario(text: str) -> Scenario:
    """Parse and structurally validate a scenario document."""
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ScenarioParseError(f"invalid YAML: {exc}")
    if not isinstance(doc, dict):
        raise ScenarioParseError("scenario must be a mapping")
    if doc.get("version") != SCHEMA_VERSION:
        raise ScenarioParseError(
            f"unsupported scenario version {doc.get('version')!r}", "version")

    participants = doc.get("participants", [])
    declared = set()
    for i, p in enumerate(participants):
        for key in ("id", "role"):
            if key not in p:
                raise ScenarioParseError(f"participant missing {key!r}",
                                         f"participants[{i}]")
        declared.add(p["id"])
    declared.add(doc.get("admin_id", "admin"))

    contracts = doc.get("contracts", [])
    contract_ids = set()
    for i, c in enumerate(contracts):
        for key in ("id", "commodity_type", "damage_low", "boundary_low",
                    "boundary_high", "damage_high"):
            if key not in c:
                raise ScenarioParseError(f"contract missing {key!r}",
                                         f"contracts[{i}]")
        contract_ids.add(c["id"])

    timeline = doc.get("timeline", [])
    last_tick = None
    cids = set()
    for i, step in enumerate(timeline):
        where = f"timeline[{i}]"
        action = step.get("action")
        if action not in ACTIONS:
            raise ScenarioParseError(f"unknown action {action!r}", where)
        tick = step.get("tick")
        if not isinstance(tick, int) or tick < 0:
            raise ScenarioParseError("tick must be a non-negative integer",
                                     where)
        if last_tick is not None and tick < last_tick:
            raise ScenarioParseError("timeline ticks must be non-decreasing",
                                     where)
        last_tick = tick
        # every referenced id must be declared before any execution starts
        if action == "register":
            declared.add(step.get("id"))
        else:
            for key in ("id", "seller", "buyer", "device", "regulator",
                        "retailer", "issuer"):
                if key in step and step[key] not in declared:
                    raise ScenarioParseError(
                        f"undeclared participant {step[key]!r}", where)
        if action == "create":
            if step.get("contract") not in contract_ids:
                raise ScenarioParseError(
                    f"undeclared contract {step.get('contract')!r}", where)
            cids.add(step.get("cid"))
        elif action in ("sense", "trade", "receipt") and step.get("cid") not in cids:
            raise ScenarioParseError(
                f"undeclared commodity {step.get('cid')!r}", where)

    config = doc.get("config", {})
    trust_config = TrustConfig(**{
        "decay_lambda": config.get("trust", {}).get("lambda", 0.05),
        "alpha": tuple(config.get("trust", {}).get("alpha", (1.0, 0.1))),
        "trust_min": config.get("trust", {}).get("trust_min", 0.3),
        "recompute_period": config.get("trust", {}).get("recompute_period", 50),
    })
    rating = config.get("rating", {})
    rating_config = RatingConfig(
        weights=tuple(rating.get("weights", (1 / 3, 1 / 3, 1 / 3))),
        staleness_gamma=rating.get("staleness_gamma", 0.5),
        inspection_period=rating.get("inspection_period", 100),
        neutral_score=rating.get("neutral_score", 0.5),
        flag_gamma=rating.get("flag_gamma", 0.5),
    )
    return Scenario(
        name=doc.get("name", "unnamed"),
        participants=participants,
        contracts=contracts,
        timeline=timeline,
        assertions=doc.get("assertions", []),
        trust_config=trust_config,
        rating_config=rating_config,
        batch_size=config.get("batch_size", 50),
        batch_timeout=config.get("batch_timeout", 2),
        mode=doc.get("mode", "trustchain"),
        penalty_period=config.get("penalty_period"),
    )


class ScenarioRunner:
    """Replays a scenario timeline through a fresh network."""

    def __init__(self, scenario: Scenario, seed: int = 0):
        self.scenario = scenario
        self.seed = seed
        self.keys: Dict[str, KeyPair] = {}
        admin_key = self._keypair("admin", 0)
        self.network = Network(
            trust_config=scenario.trust_config,
            rating_config=scenario.rating_config,
            mode=scenario.mode,
            admin_id="admin",
            admin_public_key=admin_key.public_bytes,
        )
        self.orderer = Orderer(self.network, scenario.batch_size,
                               scenario.batch_timeout)
        self.verdicts: List[dict] = []
        self.query_results: List[dict] = []
        self.labels: Dict[str, str] = {}  # action label -> trade tx_id

    def _keypair(self, pid: str, key_seed) -> KeyPair:
        if pid not in self.keys:
            material = f"{self.seed}:{pid}:{key_seed}"
            self.keys[pid] = KeyPair.from_seed(material)
        return self.keys[pid]

    def _data_hash(self, *parts) -> bytes:
        return hashlib.sha256("|".join(str(p) for p in parts).encode()).digest()

    def run(self) -> RunReport:
        sc = self.scenario
        for p in sc.participants:
            key = self._keypair(p["id"], p.get("key_seed", p["id"]))
            self.network.register_participant(
                "admin", p["id"], p["role"], key.public_bytes, tick=0)
        for c in sc.contracts:
            self.network.instantiate_quality_contract(QualityContract(
                contract_id=c["id"], commodity_type=c["commodity_type"],
                damage_low=float(c["damage_low"]),
                boundary_low=float(c["boundary_low"]),
                boundary_high=float(c["boundary_high"]),
                damage_high=float(c["damage_high"]),
            ))

        current_tick = 0
        for step in sc.timeline:
            tick = step["tick"]
            if tick != current_tick:
                self.orderer.on_tick(tick)
                current_tick = tick
            self._execute(step, tick)
        self.orderer.flush(current_tick)

        final_trust = self._final_trust(current_tick)
        assertion_results = [self._check(a, current_tick)
                             for a in sc.assertions]
        return RunReport(
            scenario=sc.name,
            seed=self.seed,
            state_digest=self.network.state_digest(),
            chain_valid=self.network.verify_chain(),
            events=list(self.network.state.events),
            verdicts=self.verdicts,
            assertion_results=assertion_results,
            publications=list(self.network.state.publications),
            final_trust=final_trust,
            query_results=self.query_results,
        )

    # -- action execution --------------------------------------------------

    def _execute(self, step: dict, tick: int) -> None:
        action = step["action"]
        expect = step.get("expect", "accept")
        try:
            outcome = getattr(self, f"_do_{action}")(step, tick)
        except TrustChainError as exc:
            outcome = f"error:{type(exc).__name__}"
        entry = {"tick": tick, "action": action, "outcome": outcome}
        if "label" in step:
            entry["label"] = step["label"]
        entry["as_expected"] = self._matches(expect, outcome)
        self.verdicts.append(entry)

    @staticmethod
    def _matches(expect: str, outcome: str) -> bool:
        if expect == "reject":
            return outcome.startswith("reject")
        if expect == "error":
            return outcome.startswith("error")
        return outcome == expect

    def _submit(self, tx, tick: int) -> str:
        verdict = self.orderer.submit(tx, tick)
        if verdict.accepted:
            return "accept"
        return f"reject:{verdict.reason}"

    def _do_register(self, step, tick) -> str:
        pid = step["id"]
        key = self._keypair(pid, step.get("key_seed", pid))
        self.network.register_participant(
            step.get("issuer", "admin"), pid, step["role"],
            key.public_bytes, tick=tick)
        return "accept"

    def _do_create(self, step, tick) -> str:
        owner = step["id"]
        key = self.keys[owner]
        tx = txn.Create(
            cid=step["cid"],
            data_hash=self._data_hash("create", step["cid"], step["contract"]),
            owner_id=owner, contract_id=step["contract"],
            pub_key=key.public_bytes, submitted_at=tick,
        )
        sig = key.sign(txn.signing_payload(tx))
        tx = txn.Create(cid=tx.cid, data_hash=tx.data_hash, owner_id=owner,
                        contract_id=tx.contract_id, sig=sig,
                        pub_key=key.public_bytes, submitted_at=tick)
        return self._submit(tx, tick)

    def _do_sense(self, step, tick) -> str:
        device = step["device"]
        key = self.keys[device]
        readings = tuple(float(r) for r in step["readings"])
        tx = txn.Sensory(
            cid=step["cid"],
            data_hash=self._data_hash("sense", step["cid"], readings, tick),
            device_id=device, readings=readings, submitted_at=tick,
        )
        sig = key.sign(txn.signing_payload(tx))
        tx = txn.Sensory(cid=tx.cid, data_hash=tx.data_hash, device_id=device,
                         readings=readings, device_sig=sig, submitted_at=tick)
        return self._submit(tx, tick)

    def _do_trade(self, step, tick) -> str:
        seller_id, buyer_id = step["seller"], step["buyer"]
        # impersonation scenarios sign with someone else's key
        seller_key = self.keys[step.get("sign_as", seller_id)]
        seller_pub = self.keys[seller_id].public_bytes
        buyer_key = self.keys[buyer_id]
        base = txn.Trade(
            cid=step["cid"],
            data_hash=self._data_hash("trade", step["cid"], seller_id,
                                      buyer_id, tick),
            buyer_id=buyer_id, seller_pub=seller_pub,
            buyer_pub=buyer_key.public_bytes,
            buyer_rating=float(step.get("rating", 1.0)), submitted_at=tick,
        )
        payload = txn.signing_payload(base)
        tx = txn.Trade(
            cid=base.cid, data_hash=base.data_hash, buyer_id=buyer_id,
            seller_sig=seller_key.sign(payload), seller_pub=seller_pub,
            buyer_sig=buyer_key.sign(payload),
            buyer_pub=buyer_key.public_bytes,
            buyer_rating=base.buyer_rating, submitted_at=tick,
        )
        outcome = self._submit(tx, tick)
        if "label" in step and outcome == "accept":
            self.labels[step["label"]] = txn.tx_id(tx)
        return outcome

    def _do_regulate(self, step, tick) -> str:
        regulator = step["regulator"]
        key = self.keys[regulator]
        base = txn.RegulatorRating(
            seller_id=step["seller"],
            data_hash=self._data_hash("regulate", step["seller"], tick),
            commodity_type=step["commodity_type"],
            rating=float(step["rating"]),
            issued_at=int(step.get("issued_at", tick)),
            regulator_id=regulator, submitted_at=tick,
        )
        sig = key.sign(txn.signing_payload(base))
        tx = txn.RegulatorRating(
            seller_id=base.seller_id, data_hash=base.data_hash,
            commodity_type=base.commodity_type, rating=base.rating,
            issued_at=base.issued_at, regulator_id=regulator, sig=sig,
            submitted_at=tick,
        )
        return self._submit(tx, tick)

    def _do_receipt(self, step, tick) -> str:
        retailer = step["retailer"]
        key = self.keys[retailer]
        base = txn.Receipt(cid=step["cid"], retailer_pub=key.public_bytes,
                           submitted_at=tick)
        sig = key.sign(txn.signing_payload(base))
        tx = txn.Receipt(cid=base.cid, retailer_sig=sig,
                         retailer_pub=key.public_bytes, submitted_at=tick)
        return self._submit(tx, tick)

    def _do_flag(self, step, tick) -> str:
        # flags act on committed trades, so drain the orderer first
        self.orderer.flush(tick)
        trade_id = self.labels.get(step["trade"], step["trade"])
        evidence = self._data_hash("evidence", trade_id).hex()
        _, action = self.network.raise_dissatisfaction_flag(
            step["seller"], step["buyer"], trade_id, evidence, tick)
        return "reweight" if action else "flagged"

    def _do_revoke(self, step, tick) -> str:
        self.orderer.flush(tick)
        issuer = step.get("issuer", "admin")
        app.revoke(self.network, issuer, self.keys[issuer], step["id"], tick)
        return "accept"

    def _do_resume(self, step, tick) -> str:
        self.orderer.flush(tick)
        issuer = step.get("issuer", "admin")
        app.resume(self.network, issuer, self.keys[issuer], step["id"], tick)
        return "accept"

    def _do_recompute(self, step, tick) -> str:
        self.orderer.flush(tick)
        rep, trust = app.request_trust_recompute(
            self.network, step.get("issuer", "admin"), step["seller"],
            step["commodity_type"], tick)
        return "accept"

    def _do_query(self, step, tick) -> str:
        self.orderer.flush(tick)
        result = app.query(self.network, step["query"],
                           issuer=step.get("issuer"), now=tick)
        self.query_results.append({"tick": tick, "query": step["query"],
                                   "result": result})
        return "accept"

    def _do_publish_rewards(self, step, tick) -> str:
        self.orderer.flush(tick)
        app.publish_rewards(self.network, int(step.get("k", 3)), tick)
        return "accept"

    # -- reporting ---------------------------------------------------------

    def _final_trust(self, tick: int) -> Dict[str, dict]:
        out = {}
        for pid in sorted(self.network.state.profiles):
            profile = self.network.state.profiles[pid]
            per_type = {}
            for ctype in sorted(profile.histories):
                rep, trust = app.request_trust_recompute(
                    self.network, "admin", pid, ctype, tick)
                per_type[ctype] = {"R": rep, "T": trust}
            out[pid] = {"trust": profile.trust, "per_type": per_type}
        return out

    # -- assertions --------------------------------------------------------

    def _check(self, assertion: dict, tick: int) -> dict:
        kind = assertion["kind"]
        state = self.network.state
        ok, detail = False, ""
        if kind == "owner":
            c = state.commodities.get(assertion["cid"])
            ok = c is not None and c.owner == assertion["expect"]
            detail = c.owner if c else "missing"
        elif kind == "chain_complete":
            c = state.commodities.get(assertion["cid"])
            ok = c is not None and c.chain_complete == bool(assertion["expect"])
            detail = str(c.chain_complete) if c else "missing"
        elif kind == "status":
            p = state.participants.get(assertion["id"])
            ok = p is not None and p.status == assertion["expect"]
            detail = p.status if p else "missing"
        elif kind == "rep_events":
            profile = state.profiles.get(assertion["id"])
            n = len(profile.histories.get(assertion["commodity_type"], [])
                    ) if profile else 0
            ok = n == int(assertion["expect"])
            detail = str(n)
        elif kind == "score_vector_len":
            c = state.commodities.get(assertion["cid"])
            n = len(c.sensor_scores) if c else 0
            ok = n == int(assertion["expect"])
            detail = str(n)
        elif kind == "overall_rating":
            c = state.commodities.get(assertion["cid"])
            tol = float(assertion.get("tol", 1e-9))
            ok = (c is not None and c.overall_rating is not None
                  and abs(c.overall_rating - float(assertion["expect"])) <= tol)
            detail = str(c.overall_rating if c else None)
        elif kind == "provenance":
            c = state.commodities.get(assertion["cid"])
            owners = [o for _, o in c.owner_history] if c else []
            ok = owners == list(assertion["expect"])
            detail = str(owners)
        elif kind == "incomplete_chains":
            result = app.query(self.network,
                               {"kind": "IncompleteChains",
                                "older_than": assertion.get("older_than", 0)},
                               issuer="admin", now=tick)
            cids = set(result["cids"])
            ok = (set(assertion.get("contains", [])) <= cids
                  and not (set(assertion.get("excludes", [])) & cids))
            detail = str(sorted(cids))
        elif kind == "reweight":
            fired = any(e["kind"] == "reweight"
                        and e.get("seller") == assertion["seller"]
                        and e.get("buyer") == assertion["buyer"]
                        for e in state.events)
            ok = fired == bool(assertion["expect"])
            detail = str(fired)
        elif kind == "verify_chain":
            valid = self.network.verify_chain()
            ok = valid == bool(assertion.get("expect", True))
            detail = str(valid)
        elif kind == "event_count":
            n = sum(1 for e in state.events
                    if e["kind"] == assertion["event_kind"])
            ok = n == int(assertion["expect"])
            detail = str(n)
        elif kind == "action_outcomes":
            # every timeline step matched its declared expectation
            bad = [v for v in self.verdicts if not v["as_expected"]]
            ok = not bad
            detail = str(bad)
        else:
            detail = f"unknown assertion kind {kind!r}"
        return {"kind": kind, "ok": ok, "detail": detail,
                "assertion": assertion}


def run_scenario(text: str, seed: int = 0,
                 strict: bool = False) -> RunReport:
    """Parse and replay a scenario; with strict=True, assertion failures
    raise ScenarioAssertionError."""
    scenario = parse_scenario(text)
    report = ScenarioRunner(scenario, seed).run()
    failures = [r for r in report.assertion_results if not r["ok"]]
    if strict and failures:
        raise ScenarioAssertionError(failures)
    return report


def bundled_scenario(name: str) -> str:
    """Load a scenario file shipped with the package."""
    path = resources.files("trustchain.scenarios").joinpath(f"{name}.yaml")
    return path.read_text()


def bundled_scenario_names() -> List[str]:
    root = resources.files("trustchain.scenarios")
    return sorted(p.name[:-5] for p in root.iterdir()
                  if p.name.endswith(".yaml"))
