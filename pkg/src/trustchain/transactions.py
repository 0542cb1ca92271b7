"""Ledger transaction types and their canonical byte serialization.

Seven transaction kinds: the five data-layer transactions (create, trade,
sensory, regulator rating, receipt) plus the two admin transactions
(revoke, resume). Byte layout is documented field-by-field in
docs/FORMATS.md; tx_id is the SHA-256 hex digest of the canonical bytes.

Signature fields are encoded as empty strings when building the message a
party signs, so a signature covers every field except the signatures
themselves.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .encoding import (
    Decoder,
    enc_bytes,
    enc_f64,
    enc_f64_list,
    enc_str,
    enc_u8,
    enc_u64,
    sha256,
)

TAG_CREATE = 1
TAG_TRADE = 2
TAG_SENSORY = 3
TAG_REGULATOR = 4
TAG_RECEIPT = 5
TAG_REVOKE = 6
TAG_RESUME = 7


@dataclass(frozen=True)
class Create:
    """Confirms existence of a new commodity, bound to a quality contract."""

    cid: str
    data_hash: bytes
    owner_id: str
    contract_id: str
    sig: bytes = b""
    pub_key: bytes = b""
    submitted_at: int = 0
    kind = "create"
    tag = TAG_CREATE

    def _encode(self, with_sigs: bool) -> bytes:
        return (
            enc_u8(self.tag)
            + enc_u64(self.submitted_at)
            + enc_str(self.cid)
            + enc_bytes(self.data_hash)
            + enc_str(self.owner_id)
            + enc_str(self.contract_id)
            + enc_bytes(self.sig if with_sigs else b"")
            + enc_bytes(self.pub_key)
        )


@dataclass(frozen=True)
class Trade:
    """Physical handover of a commodity, co-signed by seller and buyer,
    carrying the buyer's rating for the seller."""

    cid: str
    data_hash: bytes
    buyer_id: str
    seller_sig: bytes = b""
    seller_pub: bytes = b""
    buyer_sig: bytes = b""
    buyer_pub: bytes = b""
    buyer_rating: float = 0.0
    submitted_at: int = 0
    kind = "trade"
    tag = TAG_TRADE

    def _encode(self, with_sigs: bool) -> bytes:
        return (
            enc_u8(self.tag)
            + enc_u64(self.submitted_at)
            + enc_str(self.cid)
            + enc_bytes(self.data_hash)
            + enc_str(self.buyer_id)
            + enc_bytes(self.seller_sig if with_sigs else b"")
            + enc_bytes(self.seller_pub)
            + enc_bytes(self.buyer_sig if with_sigs else b"")
            + enc_bytes(self.buyer_pub)
            + enc_f64(self.buyer_rating)
        )


@dataclass(frozen=True)
class Sensory:
    """Temperature readings for a commodity, signed by a gateway device."""

    cid: str
    data_hash: bytes
    device_id: str
    readings: tuple = ()
    device_sig: bytes = b""
    submitted_at: int = 0
    kind = "sensory"
    tag = TAG_SENSORY

    def _encode(self, with_sigs: bool) -> bytes:
        return (
            enc_u8(self.tag)
            + enc_u64(self.submitted_at)
            + enc_str(self.cid)
            + enc_bytes(self.data_hash)
            + enc_str(self.device_id)
            + enc_f64_list(self.readings)
            + enc_bytes(self.device_sig if with_sigs else b"")
        )


@dataclass(frozen=True)
class RegulatorRating:
    """A regulator's inspection rating for a seller, per commodity type."""

    seller_id: str
    data_hash: bytes
    commodity_type: str
    rating: float
    issued_at: int
    regulator_id: str = ""
    sig: bytes = b""
    submitted_at: int = 0
    kind = "regulator_rating"
    tag = TAG_REGULATOR

    def _encode(self, with_sigs: bool) -> bytes:
        return (
            enc_u8(self.tag)
            + enc_u64(self.submitted_at)
            + enc_str(self.seller_id)
            + enc_bytes(self.data_hash)
            + enc_str(self.commodity_type)
            + enc_f64(self.rating)
            + enc_u64(self.issued_at)
            + enc_str(self.regulator_id)
            + enc_bytes(self.sig if with_sigs else b"")
        )


@dataclass(frozen=True)
class Receipt:
    """End-of-chain receipt issued by the retailer holding the commodity."""

    cid: str
    retailer_sig: bytes = b""
    retailer_pub: bytes = b""
    submitted_at: int = 0
    kind = "receipt"
    tag = TAG_RECEIPT

    def _encode(self, with_sigs: bool) -> bytes:
        return (
            enc_u8(self.tag)
            + enc_u64(self.submitted_at)
            + enc_str(self.cid)
            + enc_bytes(self.retailer_sig if with_sigs else b"")
            + enc_bytes(self.retailer_pub)
        )


@dataclass(frozen=True)
class Revoke:
    """Admin action removing a participant from the network."""

    participant_id: str
    admin_id: str = ""
    sig: bytes = b""
    submitted_at: int = 0
    kind = "revoke"
    tag = TAG_REVOKE

    def _encode(self, with_sigs: bool) -> bytes:
        return (
            enc_u8(self.tag)
            + enc_u64(self.submitted_at)
            + enc_str(self.participant_id)
            + enc_str(self.admin_id)
            + enc_bytes(self.sig if with_sigs else b"")
        )


@dataclass(frozen=True)
class Resume:
    """Admin action restoring a revoked participant after the penalty period."""

    participant_id: str
    admin_id: str = ""
    sig: bytes = b""
    submitted_at: int = 0
    kind = "resume"
    tag = TAG_RESUME

    def _encode(self, with_sigs: bool) -> bytes:
        return (
            enc_u8(self.tag)
            + enc_u64(self.submitted_at)
            + enc_str(self.participant_id)
            + enc_str(self.admin_id)
            + enc_bytes(self.sig if with_sigs else b"")
        )


Transaction = Union[Create, Trade, Sensory, RegulatorRating, Receipt, Revoke, Resume]


def canonical_bytes(tx: Transaction) -> bytes:
    return tx._encode(with_sigs=True)


def signing_payload(tx: Transaction) -> bytes:
    """Bytes a party signs: canonical encoding with signature fields empty."""
    return tx._encode(with_sigs=False)


def tx_id(tx: Transaction) -> str:
    return sha256(canonical_bytes(tx)).hex()


def decode(data: bytes) -> Transaction:
    """Parse canonical bytes back into a transaction; inverse of canonical_bytes."""
    d = Decoder(data)
    tag = d.u8()
    at = d.u64()
    if tag == TAG_CREATE:
        tx = Create(
            cid=d.string(), data_hash=d.raw(), owner_id=d.string(),
            contract_id=d.string(), sig=d.raw(), pub_key=d.raw(), submitted_at=at,
        )
    elif tag == TAG_TRADE:
        tx = Trade(
            cid=d.string(), data_hash=d.raw(), buyer_id=d.string(),
            seller_sig=d.raw(), seller_pub=d.raw(), buyer_sig=d.raw(),
            buyer_pub=d.raw(), buyer_rating=d.f64(), submitted_at=at,
        )
    elif tag == TAG_SENSORY:
        tx = Sensory(
            cid=d.string(), data_hash=d.raw(), device_id=d.string(),
            readings=tuple(d.f64_list()), device_sig=d.raw(), submitted_at=at,
        )
    elif tag == TAG_REGULATOR:
        tx = RegulatorRating(
            seller_id=d.string(), data_hash=d.raw(), commodity_type=d.string(),
            rating=d.f64(), issued_at=d.u64(), regulator_id=d.string(),
            sig=d.raw(), submitted_at=at,
        )
    elif tag == TAG_RECEIPT:
        tx = Receipt(
            cid=d.string(), retailer_sig=d.raw(), retailer_pub=d.raw(),
            submitted_at=at,
        )
    elif tag == TAG_REVOKE:
        tx = Revoke(
            participant_id=d.string(), admin_id=d.string(), sig=d.raw(),
            submitted_at=at,
        )
    elif tag == TAG_RESUME:
        tx = Resume(
            participant_id=d.string(), admin_id=d.string(), sig=d.raw(),
            submitted_at=at,
        )
    else:
        raise ValueError(f"unknown transaction tag {tag}")
    if not d.done():
        raise ValueError("trailing bytes after transaction")
    return tx
