import pytest
from hypothesis import given
from hypothesis import strategies as st

from trustchain import encoding as enc
from trustchain import transactions as txn

finite_f64 = st.floats(allow_nan=False, allow_infinity=False, width=64)


def test_primitive_widths():
    assert enc.enc_u8(7) == b"\x07"
    assert enc.enc_u64(1) == b"\x00" * 7 + b"\x01"
    assert enc.enc_bytes(b"ab") == b"\x00\x00\x00\x02ab"
    assert enc.enc_str("hi") == b"\x00\x00\x00\x02hi"
    assert len(enc.enc_f64(1.5)) == 8
    assert enc.ZERO_DIGEST == b"\x00" * 32


@given(st.integers(0, 2**64 - 1), finite_f64, st.binary(max_size=64),
       st.text(max_size=32), st.lists(finite_f64, max_size=8))
def test_decoder_round_trip(u, f, b, s, fl):
    data = (enc.enc_u64(u) + enc.enc_f64(f) + enc.enc_bytes(b)
            + enc.enc_str(s) + enc.enc_f64_list(fl))
    d = enc.Decoder(data)
    assert d.u64() == u
    assert d.f64() == f
    assert d.raw() == b
    assert d.string() == s
    assert d.f64_list() == fl
    assert d.done()


def test_decoder_truncation():
    with pytest.raises(ValueError):
        enc.Decoder(b"\x00\x00\x00\x05ab").raw()


def test_canonical_json_is_order_insensitive():
    a = enc.canonical_json({"b": 1, "a": [1, 2]})
    b = enc.canonical_json({"a": [1, 2], "b": 1})
    assert a == b
    assert b" " not in a


SAMPLE_TXS = [
    txn.Create(cid="c1", data_hash=b"\x01" * 32, owner_id="farm",
               contract_id="frozen-goods", sig=b"s" * 64, pub_key=b"p" * 32,
               submitted_at=3),
    txn.Trade(cid="c1", data_hash=b"\x02" * 32, buyer_id="ship",
              seller_sig=b"a" * 64, seller_pub=b"b" * 32, buyer_sig=b"c" * 64,
              buyer_pub=b"d" * 32, buyer_rating=0.75, submitted_at=9),
    txn.Sensory(cid="c1", data_hash=b"\x03" * 32, device_id="gw1",
                readings=(-19.5, -18.0, 1.25), device_sig=b"e" * 64,
                submitted_at=5),
    txn.RegulatorRating(seller_id="farm", data_hash=b"\x04" * 32,
                        commodity_type="frozen", rating=0.9, issued_at=4,
                        regulator_id="fsa", sig=b"f" * 64, submitted_at=6),
    txn.Receipt(cid="c1", retailer_sig=b"g" * 64, retailer_pub=b"h" * 32,
                submitted_at=11),
    txn.Revoke(participant_id="mallory", admin_id="admin", sig=b"i" * 64,
               submitted_at=12),
    txn.Resume(participant_id="mallory", admin_id="admin", sig=b"j" * 64,
               submitted_at=40),
]


@pytest.mark.parametrize("tx", SAMPLE_TXS, ids=lambda t: t.kind)
def test_transaction_round_trip(tx):
    assert txn.decode(txn.canonical_bytes(tx)) == tx


@pytest.mark.parametrize("tx", SAMPLE_TXS, ids=lambda t: t.kind)
def test_tx_id_is_hash_of_canonical_bytes(tx):
    assert txn.tx_id(tx) == enc.sha256(txn.canonical_bytes(tx)).hex()
    assert txn.tx_id(tx) == txn.tx_id(tx)


def test_signing_payload_blanks_only_signatures():
    tx = SAMPLE_TXS[1]
    payload = txn.signing_payload(tx)
    assert payload != txn.canonical_bytes(tx)
    # payload must be independent of the signatures present on the tx
    unsigned = txn.Trade(cid=tx.cid, data_hash=tx.data_hash,
                         buyer_id=tx.buyer_id, seller_pub=tx.seller_pub,
                         buyer_pub=tx.buyer_pub, buyer_rating=tx.buyer_rating,
                         submitted_at=tx.submitted_at)
    assert payload == txn.signing_payload(unsigned)
    assert payload == txn.canonical_bytes(unsigned)


def test_decode_rejects_trailing_bytes_and_unknown_tag():
    blob = txn.canonical_bytes(SAMPLE_TXS[0])
    with pytest.raises(ValueError):
        txn.decode(blob + b"\x00")
    with pytest.raises(ValueError):
        txn.decode(b"\xff" + blob[1:])
