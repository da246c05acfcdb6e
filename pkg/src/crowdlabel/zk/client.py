"""Worker-side credential management for the commit-nullify flow.

The keyring walks a per-job secret chain: secret 0 backs the join
commitment; each label submission proves membership of the current
commitment, reveals its nullifier, and deposits a commitment to the next
secret. All history is retained so the performance claim can be built
after truth is posted. Secrets never leave this object.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .backend import Proof, ProofBackend, TransparentBackend
from .merkle import MerkleTree
from .primitives import join_commitment, label_commitment, nullifier, secret_at, secret_root
from .statements import (
    MembershipPublic,
    MembershipWitness,
    PerformancePublic,
    PerformanceWitness,
)


@dataclass
class SubmissionBundle:
    """Everything a label submission puts on the wire."""

    public: MembershipPublic
    proof: Proof


@dataclass
class WorkerKeyring:
    job_id: int
    root: bytes  # 32-byte chain root
    backend: ProofBackend = field(default_factory=TransparentBackend)
    step: int = 0  # index of the secret backing the current credential
    leaf_index: int | None = None  # where the current commitment sits in the tree
    history: list[tuple[bytes, int, int]] = field(default_factory=list)  # (secret, sample, label)

    @classmethod
    def from_seed(cls, seed: int, job_id: int, backend: ProofBackend | None = None) -> "WorkerKeyring":
        return cls(job_id=job_id, root=secret_root(seed), backend=backend or TransparentBackend())

    def _secret(self, index: int) -> bytes:
        return secret_at(self.root, self.job_id, index)

    def join_commitment(self) -> bytes:
        return join_commitment(self._secret(self.step))

    def on_joined(self, leaf_index: int) -> None:
        self.leaf_index = leaf_index

    def build_submission(self, leaves: list[bytes], sample_id: int, label: int, depth: int) -> SubmissionBundle:
        """Prove membership of the current credential and chain the next one."""
        if self.leaf_index is None:
            raise ValueError("keyring has not joined (no leaf index)")
        secret = self._secret(self.step)
        next_secret = self._secret(self.step + 1)
        tree = MerkleTree.from_leaves(leaves, depth)
        path = tree.path(self.leaf_index)
        public = MembershipPublic(
            root=tree.root(),
            nullifier=nullifier(secret, self.job_id),
            job_id=self.job_id,
            new_commitment=join_commitment(next_secret),
            label_commitment=label_commitment(secret, sample_id, label),
            sample_id=sample_id,
            label=label,
        )
        proof = self.backend.prove_membership(public, MembershipWitness(secret, path))
        return SubmissionBundle(public, proof)

    def on_submitted(self, sample_id: int, label: int, new_leaf_index: int) -> None:
        """Advance the chain after the ledger accepted a submission."""
        self.history.append((self._secret(self.step), sample_id, label))
        self.step += 1
        self.leaf_index = new_leaf_index

    def correct_count(self, truth: dict[int, int]) -> int:
        return sum(1 for _, sid, label in self.history if truth.get(sid) == label)

    def build_claim(
        self,
        truth: dict[int, int],
        recorded_commitments: list[bytes],
        payout_address: bytes,
    ) -> tuple[PerformancePublic, Proof]:
        """Claim every label this keyring submitted against the posted truth."""
        witness = PerformanceWitness(tuple(self.history))
        public = PerformancePublic.canonical(
            job_id=self.job_id,
            truth=truth,
            recorded_commitments=recorded_commitments,
            claimed_correct=self.correct_count(truth),
            claimed_total=len(self.history),
            payout_address=payout_address,
        )
        proof = self.backend.prove_performance(public, witness)
        return public, proof
