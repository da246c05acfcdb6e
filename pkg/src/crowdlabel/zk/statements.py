"""The two proof statements behind the anonymity layer.

Membership: "I know the pre-image of a commitment sitting in the tree under
`root`; its nullifier for this job is `nullifier`; and I bind this one label
submission plus my next credential to it."

Performance: "These `claimed_total` recorded label commitments are mine, the
sample ids are distinct, and exactly `claimed_correct` of the labels match
the posted truth."

Each statement has a canonical public-input encoding and a digest that any
proof must commit to; verification is a pure function of (publics, witness).
"""

from __future__ import annotations

from dataclasses import dataclass

from ..encoding import enc_b32, enc_b32list, enc_pairs, enc_u64
from .merkle import MerklePath
from .primitives import hash256, join_commitment, label_commitment, nullifier

MEMBERSHIP_DOMAIN = b"crowdlabel/membership/v1"
PERFORMANCE_DOMAIN = b"crowdlabel/performance/v1"


@dataclass(frozen=True)
class MembershipPublic:
    root: bytes
    nullifier: bytes
    job_id: int
    new_commitment: bytes
    label_commitment: bytes
    sample_id: int
    label: int

    def encode(self) -> bytes:
        return b"".join(
            (
                enc_b32(self.root),
                enc_b32(self.nullifier),
                enc_u64(self.job_id),
                enc_b32(self.new_commitment),
                enc_b32(self.label_commitment),
                enc_u64(self.sample_id),
                enc_u64(self.label),
            )
        )

    def digest(self) -> bytes:
        return hash256(MEMBERSHIP_DOMAIN + self.encode())


@dataclass(frozen=True)
class MembershipWitness:
    secret: bytes
    path: MerklePath

    def encode(self) -> bytes:
        parts = [
            enc_b32(self.secret),
            enc_u64(self.path.leaf_index),
            enc_u64(len(self.path.siblings)),
        ]
        parts.extend(enc_b32(s) for s in self.path.siblings)
        return b"".join(parts)

    @classmethod
    def decode(cls, data: bytes) -> "MembershipWitness":
        from ..encoding import Reader

        r = Reader(data)
        secret = r.b32()
        leaf_index = r.u64()
        n = r.u64()
        siblings = [r.b32() for _ in range(n)]
        r.done()
        return cls(secret, MerklePath(leaf_index, siblings))


def membership_holds(public: MembershipPublic, witness: MembershipWitness) -> bool:
    """The exact relation: tree membership + nullifier + label binding."""
    leaf = join_commitment(witness.secret)
    if witness.path.fold(leaf) != public.root:
        return False
    if nullifier(witness.secret, public.job_id) != public.nullifier:
        return False
    if label_commitment(witness.secret, public.sample_id, public.label) != public.label_commitment:
        return False
    return True


@dataclass(frozen=True)
class PerformancePublic:
    job_id: int
    truth: tuple[tuple[int, int], ...]  # (sample_id, truth_label), sorted by sample_id
    recorded_commitments: tuple[bytes, ...]  # sorted
    claimed_correct: int
    claimed_total: int
    payout_address: bytes

    @staticmethod
    def canonical(
        job_id: int,
        truth: dict[int, int],
        recorded_commitments: list[bytes] | tuple[bytes, ...],
        claimed_correct: int,
        claimed_total: int,
        payout_address: bytes,
    ) -> "PerformancePublic":
        return PerformancePublic(
            job_id=job_id,
            truth=tuple(sorted(truth.items())),
            recorded_commitments=tuple(sorted(recorded_commitments)),
            claimed_correct=claimed_correct,
            claimed_total=claimed_total,
            payout_address=payout_address,
        )

    def encode(self) -> bytes:
        return b"".join(
            (
                enc_u64(self.job_id),
                enc_pairs(list(self.truth)),
                enc_b32list(list(self.recorded_commitments)),
                enc_u64(self.claimed_correct),
                enc_u64(self.claimed_total),
                enc_b32(self.payout_address),
            )
        )

    def digest(self) -> bytes:
        return hash256(PERFORMANCE_DOMAIN + self.encode())


@dataclass(frozen=True)
class PerformanceWitness:
    entries: tuple[tuple[bytes, int, int], ...]  # (secret, sample_id, label)

    def encode(self) -> bytes:
        parts = [enc_u64(len(self.entries))]
        for secret, sample_id, label in self.entries:
            parts.append(enc_b32(secret))
            parts.append(enc_u64(sample_id))
            parts.append(enc_u64(label))
        return b"".join(parts)

    @classmethod
    def decode(cls, data: bytes) -> "PerformanceWitness":
        from ..encoding import Reader

        r = Reader(data)
        n = r.u64()
        entries = tuple((r.b32(), r.u64(), r.u64()) for _ in range(n))
        r.done()
        return cls(entries)

    def commitments(self) -> list[bytes]:
        return [label_commitment(s, sid, lab) for s, sid, lab in self.entries]


def performance_holds(public: PerformancePublic, witness: PerformanceWitness) -> bool:
    """The exact relation: recorded ownership, distinct samples, correct count."""
    recorded = set(public.recorded_commitments)
    truth = dict(public.truth)
    sample_ids = [sid for _, sid, _ in witness.entries]
    if len(set(sample_ids)) != len(sample_ids):
        return False
    if public.claimed_total != len(witness.entries):
        return False
    correct = 0
    for secret, sample_id, label in witness.entries:
        if label_commitment(secret, sample_id, label) not in recorded:
            return False
        if sample_id in truth and truth[sample_id] == label:
            correct += 1
    return correct == public.claimed_correct
