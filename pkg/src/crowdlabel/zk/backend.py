"""Pluggable proof backend.

The reference backend is a transparent oracle: the proof blob is a versioned,
length-prefixed encoding of the witness bound to the statement digest, and
the verifier re-executes the statement relation against it. It preserves the
protocol flow and every contract-side check exactly; a succinct backend can
be registered under a different id without touching the contracts.

The witness encoding is blinded with a keystream derived from the statement
digest before it enters the blob. Real proofs carry no witness bytes, so
on-chain blobs must not either: a byte scan of ledger state never finds
commitments, secrets, or sibling hashes verbatim. The blinding is reversible
from public data (the verifier needs the witness back); it provides
structural non-identifiability, not confidentiality.

Blob layout (PROTOCOL.md):
  u8   version (0x01)
  b32  statement digest
  u32  witness length || blinded witness bytes
  b32  integrity hash = H("crowdlabel/proof/v1" || digest || plaintext witness)
"""

from __future__ import annotations

from dataclasses import dataclass

from ..encoding import EncodingError, Reader, enc_bytes, enc_u64
from .primitives import hash256
from .statements import (
    MembershipPublic,
    MembershipWitness,
    PerformancePublic,
    PerformanceWitness,
    membership_holds,
    performance_holds,
)

PROOF_DOMAIN = b"crowdlabel/proof/v1"
BLIND_DOMAIN = b"crowdlabel/proof-blind/v1"
BLOB_VERSION = 1


def _keystream(digest: bytes, length: int) -> bytes:
    blocks = []
    for counter in range((length + 31) // 32):
        blocks.append(hash256(BLIND_DOMAIN + digest + enc_u64(counter)))
    return b"".join(blocks)[:length]


def _blind(digest: bytes, data: bytes) -> bytes:
    return bytes(a ^ b for a, b in zip(data, _keystream(digest, len(data))))


class UnsatisfiedStatement(Exception):
    """Prover refuses to emit a proof for a witness that fails the relation."""


@dataclass(frozen=True)
class Proof:
    backend_id: str
    statement_digest: bytes
    blob: bytes

    def encode(self) -> bytes:
        return (
            enc_bytes(self.backend_id.encode("utf-8"))
            + self.statement_digest
            + enc_bytes(self.blob)
        )

    @classmethod
    def decode(cls, data: bytes) -> "Proof":
        r = Reader(data)
        backend_id = r.bytes_().decode("utf-8")
        digest = r.b32()
        blob = r.bytes_()
        r.done()
        return cls(backend_id, digest, blob)

    @classmethod
    def read_from(cls, r: Reader) -> "Proof":
        backend_id = r.bytes_().decode("utf-8")
        digest = r.b32()
        blob = r.bytes_()
        return cls(backend_id, digest, blob)


def _pack_blob(digest: bytes, witness_bytes: bytes) -> bytes:
    integrity = hash256(PROOF_DOMAIN + digest + witness_bytes)
    return bytes([BLOB_VERSION]) + digest + enc_bytes(_blind(digest, witness_bytes)) + integrity


def _unpack_blob(blob: bytes) -> tuple[bytes, bytes] | None:
    """Returns (digest, plaintext witness bytes) or None if malformed."""
    try:
        r = Reader(blob)
        version = r.take(1)[0]
        if version != BLOB_VERSION:
            return None
        digest = r.b32()
        witness_bytes = _blind(digest, r.bytes_())
        integrity = r.b32()
        r.done()
    except EncodingError:
        return None
    if integrity != hash256(PROOF_DOMAIN + digest + witness_bytes):
        return None
    return digest, witness_bytes


class ProofBackend:
    """Interface every backend implements."""

    backend_id: str

    def prove_membership(self, public: MembershipPublic, witness: MembershipWitness) -> Proof:
        raise NotImplementedError

    def verify_membership(self, public: MembershipPublic, proof: Proof) -> bool:
        raise NotImplementedError

    def prove_performance(self, public: PerformancePublic, witness: PerformanceWitness) -> Proof:
        raise NotImplementedError

    def verify_performance(self, public: PerformancePublic, proof: Proof) -> bool:
        raise NotImplementedError

    def claimed_commitments(self, proof: Proof) -> list[bytes]:
        """Label commitments spent by a verified performance proof.

        The spec's claim flow marks witness commitments spent, but the public
        inputs carry no claim nullifiers, so the backend must surface them.
        Only call after verify_performance returned True.
        """
        raise NotImplementedError


class TransparentBackend(ProofBackend):
    backend_id = "transparent-v1"

    def prove_membership(self, public: MembershipPublic, witness: MembershipWitness) -> Proof:
        if not membership_holds(public, witness):
            raise UnsatisfiedStatement("membership relation does not hold for this witness")
        digest = public.digest()
        return Proof(self.backend_id, digest, _pack_blob(digest, witness.encode()))

    def verify_membership(self, public: MembershipPublic, proof: Proof) -> bool:
        if proof.backend_id != self.backend_id:
            return False
        digest = public.digest()
        if proof.statement_digest != digest:
            return False
        unpacked = _unpack_blob(proof.blob)
        if unpacked is None or unpacked[0] != digest:
            return False
        try:
            witness = MembershipWitness.decode(unpacked[1])
        except EncodingError:
            return False
        return membership_holds(public, witness)

    def prove_performance(self, public: PerformancePublic, witness: PerformanceWitness) -> Proof:
        if not performance_holds(public, witness):
            raise UnsatisfiedStatement("performance relation does not hold for this witness")
        digest = public.digest()
        return Proof(self.backend_id, digest, _pack_blob(digest, witness.encode()))

    def verify_performance(self, public: PerformancePublic, proof: Proof) -> bool:
        if proof.backend_id != self.backend_id:
            return False
        digest = public.digest()
        if proof.statement_digest != digest:
            return False
        unpacked = _unpack_blob(proof.blob)
        if unpacked is None or unpacked[0] != digest:
            return False
        try:
            witness = PerformanceWitness.decode(unpacked[1])
        except EncodingError:
            return False
        return performance_holds(public, witness)

    def claimed_commitments(self, proof: Proof) -> list[bytes]:
        unpacked = _unpack_blob(proof.blob)
        if unpacked is None:
            raise ValueError("malformed proof blob")
        return PerformanceWitness.decode(unpacked[1]).commitments()


_BACKENDS: dict[str, ProofBackend] = {}


def register_backend(backend: ProofBackend) -> None:
    _BACKENDS[backend.backend_id] = backend


def get_backend(backend_id: str) -> ProofBackend | None:
    return _BACKENDS.get(backend_id)


register_backend(TransparentBackend())
