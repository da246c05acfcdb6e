import pytest
from hypothesis import given, strategies as st

from crowdlabel.encoding import (
    EncodingError,
    decode_fields,
    enc_b32,
    enc_bytes,
    enc_u64,
    encode_fields,
)

SCHEMA = ("u64", "bytes", "b32", "u64list", "pairs", "b32list")


def test_u64_layout():
    assert enc_u64(0) == b"\x00" * 8
    assert enc_u64(1) == b"\x00" * 7 + b"\x01"
    assert enc_u64(2**64 - 1) == b"\xff" * 8
    with pytest.raises(EncodingError):
        enc_u64(2**64)
    with pytest.raises(EncodingError):
        enc_u64(-1)


def test_bytes_layout():
    assert enc_bytes(b"") == b"\x00\x00\x00\x00"
    assert enc_bytes(b"ab") == b"\x00\x00\x00\x02ab"
    with pytest.raises(EncodingError):
        enc_b32(b"short")


@given(
    st.integers(min_value=0, max_value=2**64 - 1),
    st.binary(max_size=64),
    st.binary(min_size=32, max_size=32),
    st.lists(st.integers(min_value=0, max_value=2**64 - 1), max_size=8),
    st.lists(st.tuples(st.integers(0, 1000), st.integers(0, 1000)), max_size=8),
    st.lists(st.binary(min_size=32, max_size=32), max_size=4),
)
def test_roundtrip(n, blob, b32, nums, pairs, blobs):
    values = (n, blob, b32, nums, pairs, blobs)
    decoded = decode_fields(SCHEMA, encode_fields(SCHEMA, values))
    assert decoded == values


def test_trailing_bytes_rejected():
    payload = encode_fields(("u64",), (7,)) + b"\x00"
    with pytest.raises(EncodingError):
        decode_fields(("u64",), payload)


def test_truncation_rejected():
    payload = encode_fields(("u64", "bytes"), (7, b"hello"))
    with pytest.raises(EncodingError):
        decode_fields(("u64", "bytes"), payload[:-1])
