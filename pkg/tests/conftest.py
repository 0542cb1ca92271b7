import hashlib

import pytest

from trustchain import transactions as txn
from trustchain.contracts import QualityContract, RatingConfig
from trustchain.crypto import KeyPair
from trustchain.network import Network
from trustchain.trust import TrustConfig

FROZEN = QualityContract(
    contract_id="frozen-goods", commodity_type="frozen",
    damage_low=-25.0, boundary_low=-18.0, boundary_high=0.0, damage_high=4.0,
)


def keypair(pid: str) -> KeyPair:
    return KeyPair.from_seed(f"test:{pid}")


def data_hash(*parts) -> bytes:
    return hashlib.sha256("|".join(str(p) for p in parts).encode()).digest()


class Harness:
    """Convenience wrapper building signed transactions against a network."""

    def __init__(self, network: Network):
        self.network = network
        self.keys = {"admin": keypair("admin")}

    def register(self, pid: str, role: str, tick: int = 0):
        key = keypair(pid)
        self.keys[pid] = key
        return self.network.register_participant(
            "admin", pid, role, key.public_bytes, tick=tick)

    def create_tx(self, owner: str, cid: str, tick: int,
                  contract_id: str = "frozen-goods") -> txn.Create:
        key = self.keys[owner]
        base = txn.Create(cid=cid, data_hash=data_hash("create", cid),
                          owner_id=owner, contract_id=contract_id,
                          pub_key=key.public_bytes, submitted_at=tick)
        sig = key.sign(txn.signing_payload(base))
        return txn.Create(cid=cid, data_hash=base.data_hash, owner_id=owner,
                          contract_id=contract_id, sig=sig,
                          pub_key=key.public_bytes, submitted_at=tick)

    def trade_tx(self, seller: str, buyer: str, cid: str, tick: int,
                 rating: float = 1.0, sign_as: str = None) -> txn.Trade:
        seller_key = self.keys[sign_as or seller]
        buyer_key = self.keys[buyer]
        base = txn.Trade(
            cid=cid, data_hash=data_hash("trade", cid, seller, buyer, tick),
            buyer_id=buyer, seller_pub=self.keys[seller].public_bytes,
            buyer_pub=buyer_key.public_bytes, buyer_rating=rating,
            submitted_at=tick,
        )
        payload = txn.signing_payload(base)
        return txn.Trade(
            cid=cid, data_hash=base.data_hash, buyer_id=buyer,
            seller_sig=seller_key.sign(payload),
            seller_pub=base.seller_pub,
            buyer_sig=buyer_key.sign(payload),
            buyer_pub=base.buyer_pub, buyer_rating=rating, submitted_at=tick,
        )

    def sensory_tx(self, device: str, cid: str, readings, tick: int
                   ) -> txn.Sensory:
        key = self.keys[device]
        base = txn.Sensory(cid=cid,
                           data_hash=data_hash("sense", cid, tick),
                           device_id=device, readings=tuple(readings),
                           submitted_at=tick)
        sig = key.sign(txn.signing_payload(base))
        return txn.Sensory(cid=cid, data_hash=base.data_hash,
                           device_id=device, readings=tuple(readings),
                           device_sig=sig, submitted_at=tick)

    def regulator_tx(self, regulator: str, seller: str, ctype: str,
                     rating: float, tick: int, issued_at: int = None
                     ) -> txn.RegulatorRating:
        key = self.keys[regulator]
        base = txn.RegulatorRating(
            seller_id=seller, data_hash=data_hash("reg", seller, tick),
            commodity_type=ctype, rating=rating,
            issued_at=tick if issued_at is None else issued_at,
            regulator_id=regulator, submitted_at=tick,
        )
        sig = key.sign(txn.signing_payload(base))
        return txn.RegulatorRating(
            seller_id=seller, data_hash=base.data_hash, commodity_type=ctype,
            rating=rating, issued_at=base.issued_at, regulator_id=regulator,
            sig=sig, submitted_at=tick,
        )

    def receipt_tx(self, retailer: str, cid: str, tick: int) -> txn.Receipt:
        key = self.keys[retailer]
        base = txn.Receipt(cid=cid, retailer_pub=key.public_bytes,
                           submitted_at=tick)
        sig = key.sign(txn.signing_payload(base))
        return txn.Receipt(cid=cid, retailer_sig=sig,
                           retailer_pub=key.public_bytes, submitted_at=tick)


@pytest.fixture
def network() -> Network:
    return Network(trust_config=TrustConfig(), rating_config=RatingConfig(),
                   admin_id="admin",
                   admin_public_key=keypair("admin").public_bytes)


@pytest.fixture
def harness(network) -> Harness:
    h = Harness(network)
    network.instantiate_quality_contract(FROZEN)
    h.register("farm", "PrimaryProducer")
    h.register("ship", "Logistics")
    h.register("shop", "Retailer")
    h.register("fsa", "Regulator")
    h.register("gw1", "GatewayDevice")
    return h
