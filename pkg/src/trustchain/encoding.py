"""Canonical byte encoding used for transaction serialization and digests.

The wire rules are documented in docs/FORMATS.md: big-endian fixed-width
integers, IEEE-754 binary64 floats, and u32 length prefixes for variable
length byte strings. Every digest in the system is SHA-256 over bytes
produced by these helpers, so any byte-level change is detectable.
"""

from __future__ import annotations

import hashlib
import json
import struct

ZERO_DIGEST = b"\x00" * 32


def sha256(data: bytes) -> bytes:
    return hashlib.sha256(data).digest()


def enc_u8(value: int) -> bytes:
    return struct.pack(">B", value)


def enc_u64(value: int) -> bytes:
    return struct.pack(">Q", value)


def enc_f64(value: float) -> bytes:
    return struct.pack(">d", value)


def enc_bytes(value: bytes) -> bytes:
    return struct.pack(">I", len(value)) + value


def enc_str(value: str) -> bytes:
    return enc_bytes(value.encode("utf-8"))


def enc_f64_list(values) -> bytes:
    out = struct.pack(">I", len(values))
    for v in values:
        out += enc_f64(v)
    return out


class Decoder:
    """Sequential reader for the canonical encoding."""

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def _take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise ValueError("truncated canonical encoding")
        chunk = self.data[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def u8(self) -> int:
        return struct.unpack(">B", self._take(1))[0]

    def u64(self) -> int:
        return struct.unpack(">Q", self._take(8))[0]

    def f64(self) -> float:
        return struct.unpack(">d", self._take(8))[0]

    def raw(self) -> bytes:
        n = struct.unpack(">I", self._take(4))[0]
        return self._take(n)

    def string(self) -> str:
        return self.raw().decode("utf-8")

    def f64_list(self) -> list:
        n = struct.unpack(">I", self._take(4))[0]
        return [self.f64() for _ in range(n)]

    def done(self) -> bool:
        return self.pos == len(self.data)


def canonical_json(obj) -> bytes:
    """Deterministic JSON bytes: sorted keys, compact separators."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode("utf-8")


def digest_json(obj) -> bytes:
    return sha256(canonical_json(obj))
