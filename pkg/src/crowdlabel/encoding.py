"""Canonical byte encoding shared by the ledger, contracts, and clients.

Layout rules (also documented in PROTOCOL.md):
  u64      -> 8-byte big-endian unsigned integer
  b32      -> exactly 32 raw bytes
  bytes    -> u32 big-endian length prefix, then the raw bytes
  u64list  -> u32 count, then count * u64
  pairs    -> u32 count, then count * (u64, u64)
  b32list  -> u32 count, then count * b32

Call payloads are the plain concatenation of the declared fields in order,
with no framing beyond the per-field rules above. Decoding is strict: any
leftover or missing bytes is a malformed payload.
"""

from __future__ import annotations


class EncodingError(ValueError):
    """Payload bytes do not match the declared schema."""


U64_MAX = 2**64 - 1


def enc_u64(value: int) -> bytes:
    if not 0 <= value <= U64_MAX:
        raise EncodingError(f"u64 out of range: {value}")
    return value.to_bytes(8, "big")


def enc_b32(value: bytes) -> bytes:
    if len(value) != 32:
        raise EncodingError(f"b32 must be 32 bytes, got {len(value)}")
    return bytes(value)


def enc_bytes(value: bytes) -> bytes:
    if len(value) > 0xFFFFFFFF:
        raise EncodingError("byte string too long")
    return len(value).to_bytes(4, "big") + bytes(value)


def enc_u64list(values: list[int] | tuple[int, ...]) -> bytes:
    out = [len(values).to_bytes(4, "big")]
    out.extend(enc_u64(v) for v in values)
    return b"".join(out)


def enc_pairs(pairs: list[tuple[int, int]]) -> bytes:
    out = [len(pairs).to_bytes(4, "big")]
    for a, b in pairs:
        out.append(enc_u64(a))
        out.append(enc_u64(b))
    return b"".join(out)


def enc_b32list(values: list[bytes]) -> bytes:
    out = [len(values).to_bytes(4, "big")]
    out.extend(enc_b32(v) for v in values)
    return b"".join(out)


class Reader:
    """Strict cursor over a payload buffer."""

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise EncodingError("payload truncated")
        chunk = self.data[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def u64(self) -> int:
        return int.from_bytes(self.take(8), "big")

    def u32(self) -> int:
        return int.from_bytes(self.take(4), "big")

    def b32(self) -> bytes:
        return self.take(32)

    def bytes_(self) -> bytes:
        return self.take(self.u32())

    def u64list(self) -> list[int]:
        return [self.u64() for _ in range(self.u32())]

    def pairs(self) -> list[tuple[int, int]]:
        return [(self.u64(), self.u64()) for _ in range(self.u32())]

    def b32list(self) -> list[bytes]:
        return [self.b32() for _ in range(self.u32())]

    def done(self) -> None:
        if self.pos != len(self.data):
            raise EncodingError("trailing bytes in payload")


_ENCODERS = {
    "u64": enc_u64,
    "b32": enc_b32,
    "bytes": enc_bytes,
    "u64list": enc_u64list,
    "pairs": enc_pairs,
    "b32list": enc_b32list,
}

_DECODERS = {
    "u64": Reader.u64,
    "b32": Reader.b32,
    "bytes": Reader.bytes_,
    "u64list": Reader.u64list,
    "pairs": Reader.pairs,
    "b32list": Reader.b32list,
}


def encode_fields(schema: tuple[str, ...], values: tuple) -> bytes:
    if len(schema) != len(values):
        raise EncodingError("schema/value arity mismatch")
    return b"".join(_ENCODERS[kind](value) for kind, value in zip(schema, values))


def decode_fields(schema: tuple[str, ...], payload: bytes) -> tuple:
    reader = Reader(payload)
    values = tuple(_DECODERS[kind](reader) for kind in schema)
    reader.done()
    return values
