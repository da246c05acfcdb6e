"""Crowd-worker agents: a symmetric-noise decision model plus the pump
handler that joins jobs, votes rounds to quota, and claims scores.

All agent randomness is keyed by (campaign seed, worker, sample), so a
worker's vote on a sample is identical however the campaign is scheduled --
in particular, identical between plain and anonymous runs of one config.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field

from ..alserver.dataset import Dataset
from ..encoding import decode_fields
from ..ledger import named_address
from ..runtime import JOB_CREATED_SCHEMA, LABEL_AGGREGATED_SCHEMA, ROUND_OPENED_SCHEMA, System
from ..zk.client import WorkerKeyring


@dataclass(frozen=True)
class WorkerProfile:
    worker_id: str
    accuracy: float
    secret_seed: int
    fresh_address_per_submission: bool = True

    @property
    def address(self) -> bytes:
        return named_address(f"worker:{self.worker_id}")

    def payout_address(self, campaign_seed: int, job_id: int) -> bytes:
        return hashlib.sha256(
            f"payout:{campaign_seed}:{self.worker_id}:{job_id}".encode()
        ).digest()


def worker_decide(profile: WorkerProfile, hidden_label: int, num_classes: int, rng: random.Random) -> int:
    """True label with probability `accuracy`, else a uniform wrong label."""
    if num_classes < 2:
        raise ValueError("noise model needs num_classes >= 2")
    if rng.random() < profile.accuracy:
        return hidden_label
    others = [c for c in range(num_classes) if c != hidden_label]
    return others[rng.randrange(len(others))]


def vote_rng(campaign_seed: int, worker_id: str, sample_id: int) -> random.Random:
    digest = hashlib.sha256(f"vote:{campaign_seed}:{worker_id}:{sample_id}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


class WorkerPool:
    """Round-robin voting crowd driven by ledger events."""

    def __init__(self, roster: list[WorkerProfile], dataset: Dataset, campaign_seed: int):
        self.roster = roster
        self.dataset = dataset
        self.campaign_seed = campaign_seed
        # per-job rotating cursor spreads votes over the roster; per-job so
        # plain and anonymous runs of one config schedule identically
        self.cursor: dict[int, int] = {}
        self.keyrings: dict[tuple[str, int], WorkerKeyring] = {}
        self.voted: dict[tuple[str, int, int], bool] = {}  # (worker, job, sample)
        self.payout_owner: dict[bytes, str] = {}  # payout address -> worker_id

    # ---------------------------------------------------------------- events

    def on_event(self, system: System, event) -> None:
        if event.name == "JobCreated":
            job_id, *_ = decode_fields(JOB_CREATED_SCHEMA, event.payload)
            self._join_all(system, job_id)
        elif event.name == "RoundOpened":
            job_id, _, sample_ids = decode_fields(ROUND_OPENED_SCHEMA, event.payload)
            for sid in sample_ids:
                self._vote_to_quota(system, job_id, sid)
        elif event.name == "LabelAggregated":
            job_id, sample_id, resolved, _ = decode_fields(LABEL_AGGREGATED_SCHEMA, event.payload)
            if not resolved:  # tie: the contract re-opened the sample for one more vote
                self._vote_to_quota(system, job_id, sample_id)
        elif event.name == "TruthPosted":
            job_id = decode_fields(("u64",), event.payload)[0]
            self._claim_all(system, job_id)

    # ---------------------------------------------------------------- joining

    def _join_all(self, system: System, job_id: int) -> None:
        job = system.job(job_id)
        for profile in self.roster:
            if job.zk:
                keyring = WorkerKeyring.from_seed(profile.secret_seed, job_id)
                receipt = system.join(profile.address, job, keyring.join_commitment())
                if not receipt.success:
                    raise RuntimeError(f"zk join failed: {receipt.reason}")
                event = next(e for e in receipt.events if e.name == "Joined")
                _, leaf_index, _ = decode_fields(("u64", "u64", "b32"), event.payload)
                keyring.on_joined(leaf_index)
                self.keyrings[(profile.worker_id, job_id)] = keyring
            else:
                receipt = system.join(profile.address, job)
                if not receipt.success:
                    raise RuntimeError(f"join failed: {receipt.reason}")

    # ----------------------------------------------------------------- voting

    def _vote_to_quota(self, system: System, job_id: int, sample_id: int) -> None:
        job = system.job(job_id)
        hidden = self.dataset.hidden_labels[sample_id]
        num_classes = system.ledger.read_storage(job.instance, "num_classes")
        while True:
            snapshot = system.ledger.storage_snapshot(job.instance)
            if ("labeled", sample_id) in snapshot:
                return
            votes = len(snapshot[("votes", sample_id)])
            if votes >= snapshot[("quota", sample_id)]:
                return
            profile = self._next_voter(job_id, sample_id)
            if profile is None:
                return  # roster exhausted; campaign-level stall check reports it
            label = worker_decide(
                profile, hidden, num_classes, vote_rng(self.campaign_seed, profile.worker_id, sample_id)
            )
            self.voted[(profile.worker_id, job_id, sample_id)] = True
            if job.zk:
                keyring = self.keyrings[(profile.worker_id, job_id)]
                bundle = keyring.build_submission(
                    system.tree_leaves(job), sample_id, label, system.ledger.merkle_depth
                )
                sender = (
                    system.fresh_address("relay")
                    if profile.fresh_address_per_submission
                    else profile.address
                )
                receipt = system.submit_label_zk(sender, job, bundle.public, bundle.proof)
                if not receipt.success:
                    raise RuntimeError(f"zk submit failed: {receipt.reason}")
                keyring.on_submitted(sample_id, label, len(system.tree_leaves(job)) - 1)
            else:
                receipt = system.submit_label(profile.address, job, sample_id, label)
                if not receipt.success:
                    raise RuntimeError(f"submit failed: {receipt.reason}")

    def _next_voter(self, job_id: int, sample_id: int) -> WorkerProfile | None:
        cursor = self.cursor.setdefault(job_id, 0)
        for offset in range(len(self.roster)):
            profile = self.roster[(cursor + offset) % len(self.roster)]
            if not self.voted.get((profile.worker_id, job_id, sample_id)):
                self.cursor[job_id] = (cursor + offset + 1) % len(self.roster)
                return profile
        return None

    # ---------------------------------------------------------------- claims

    def _claim_all(self, system: System, job_id: int) -> None:
        job = system.job(job_id)
        if job.zk:
            truth = system.truth_table(job)
            recorded = system.recorded_commitments(job)
            for profile in self.roster:
                keyring = self.keyrings.get((profile.worker_id, job_id))
                if keyring is None or not keyring.history:
                    continue
                payout_addr = profile.payout_address(self.campaign_seed, job_id)
                self.payout_owner[payout_addr] = profile.worker_id
                public, proof = keyring.build_claim(truth, recorded, payout_addr)
                receipt = system.claim_score_zk(system.fresh_address("relay"), job, public, proof)
                if not receipt.success:
                    raise RuntimeError(f"zk claim failed: {receipt.reason}")
        else:
            for profile in self.roster:
                receipt = system.claim_score_plain(profile.address, job)
                if not receipt.success and receipt.reason != "NotJoined":
                    raise RuntimeError(f"claim failed: {receipt.reason}")
