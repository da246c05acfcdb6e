"""Hash constructions for the commit-nullify scheme.

All values are SHA-256 digests over domain-tagged canonical byte strings.
Integers go on the wire as 8-byte big-endian (see encoding.py); the single
byte tags keep the join/label/nullifier domains disjoint. PROTOCOL.md pins
these layouts so clients can reproduce them byte-for-byte.
"""

from __future__ import annotations

import hashlib

from ..encoding import enc_u64

TAG_ZERO = b"\x00"
TAG_JOIN = b"\x01"
TAG_LABEL = b"\x02"
TAG_NULL = b"\x03"
TAG_SECRET = b"\x04"
TAG_SEED = b"\x05"

SECRET_LEN = 32


def hash256(data: bytes) -> bytes:
    return hashlib.sha256(data).digest()


def zero_leaf() -> bytes:
    """Leaf value for unfilled tree positions: H(0x00 || u64(0))."""
    return hash256(TAG_ZERO + enc_u64(0))


def join_commitment(secret: bytes) -> bytes:
    _check_secret(secret)
    return hash256(TAG_JOIN + secret)


def label_commitment(secret: bytes, sample_id: int, label: int) -> bytes:
    _check_secret(secret)
    return hash256(TAG_LABEL + secret + enc_u64(sample_id) + enc_u64(label))


def nullifier(secret: bytes, job_id: int) -> bytes:
    _check_secret(secret)
    return hash256(TAG_NULL + secret + enc_u64(job_id))


def secret_root(seed: int) -> bytes:
    """Expand a 64-bit seed into the 32-byte root of a worker's secret chain."""
    return hash256(TAG_SEED + enc_u64(seed))


def secret_at(root: bytes, job_id: int, index: int) -> bytes:
    """The index-th secret in a worker's per-job chain.

    index 0 backs the join commitment; each label submission consumes the
    current secret and deposits a commitment to the next one.
    """
    _check_secret(root)
    return hash256(TAG_SECRET + root + enc_u64(job_id) + enc_u64(index))


def _check_secret(secret: bytes) -> None:
    if len(secret) != SECRET_LEN:
        raise ValueError(f"secret must be {SECRET_LEN} bytes, got {len(secret)}")
