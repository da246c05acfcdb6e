"""System wiring: genesis deployment, typed contract-call helpers, and the
synchronous event pump that drives off-chain reactors.

The pump delivers every ledger event to each registered handler in seq
order; handlers may submit transactions, whose events re-enter the queue.
Handler registration order is the delivery order per event, which keeps
multi-reactor runs (worker pool before AL server) deterministic.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from .contracts import ALL_TEMPLATES
from .encoding import decode_fields, encode_fields
from .ledger import Event, GasSchedule, Ledger, Receipt, named_address
from .zk.backend import Proof

CREATE_JOB_SCHEMA = ("bytes", "u64", "u64", "u64", "u64", "u64", "u64", "b32", "u64")
SUBMIT_ZK_SCHEMA = ("b32", "b32", "u64", "b32", "b32", "u64", "u64", "bytes")
CLAIM_ZK_SCHEMA = ("u64", "pairs", "b32list", "u64", "u64", "b32", "bytes")

JOB_CREATED_SCHEMA = ("u64", "bytes", "b32", "b32")
ROUND_OPENED_SCHEMA = ("u64", "u64", "u64list")
LABEL_AGGREGATED_SCHEMA = ("u64", "u64", "u64", "u64")


@dataclass
class JobHandle:
    job_id: int
    dataset_ref: str
    instance: bytes
    score: bytes
    zk: bool


class System:
    """A ledger with the six templates deployed and wired."""

    def __init__(self, schedule: GasSchedule | None = None, merkle_depth: int = 16):
        self.ledger = Ledger(schedule, merkle_depth)
        for template in ALL_TEMPLATES:
            self.ledger.register_template(template)
        self.operator = named_address("operator")
        self.factory, _ = self.ledger.deploy(self.operator, "ContractFactory", b"")
        self.management, _ = self.ledger.deploy(
            self.operator, "JobManagement", encode_fields(("b32",), (self.factory,))
        )
        self.ledger.submit(
            self.operator, self.factory, "set_manager", encode_fields(("b32",), (self.management,))
        )
        self._relay_counter = 0
        self.jobs: dict[int, JobHandle] = {}

    # ------------------------------------------------------------- accounts

    def fresh_address(self, scope: str = "relay") -> bytes:
        """Single-use sender address (zk submissions come 'from any address')."""
        self._relay_counter += 1
        return hashlib.sha256(f"{scope}:{self._relay_counter}".encode()).digest()

    # ----------------------------------------------------------------- jobs

    def create_job(
        self,
        requester: bytes,
        dataset_ref: str,
        num_classes: int,
        batch_size: int,
        num_rounds: int,
        labels_per_sample: int,
        reward_pool: int,
        zk: bool,
        al_server: bytes,
        volume_weighted: bool = False,
    ) -> JobHandle:
        payload = encode_fields(
            CREATE_JOB_SCHEMA,
            (
                dataset_ref.encode("utf-8"),
                num_classes,
                batch_size,
                num_rounds,
                labels_per_sample,
                reward_pool,
                1 if zk else 0,
                al_server,
                1 if volume_weighted else 0,
            ),
        )
        receipt = self.ledger.submit(requester, self.management, "create_job", payload)
        if not receipt.success:
            raise ValueError(f"create_job reverted: {receipt.reason}")
        event = next(e for e in receipt.events if e.name == "JobCreated")
        job_id, ref, instance, score = decode_fields(JOB_CREATED_SCHEMA, event.payload)
        handle = JobHandle(job_id, ref.decode("utf-8"), instance, score, zk)
        self.jobs[job_id] = handle
        return handle

    def job(self, job_id: int) -> JobHandle:
        return self.jobs[job_id]

    # ------------------------------------------------------- plain job calls

    def join(self, worker: bytes, job: JobHandle, commitment: bytes | None = None) -> Receipt:
        if job.zk:
            assert commitment is not None, "zk join needs a commitment"
            payload = encode_fields(("b32",), (commitment,))
        else:
            payload = b""
        return self.ledger.submit(worker, job.instance, "join", payload)

    def open_round(self, al_server: bytes, job: JobHandle, round_no: int, sample_ids: list[int]) -> Receipt:
        payload = encode_fields(("u64", "u64list"), (round_no, sample_ids))
        return self.ledger.submit(al_server, job.instance, "open_round", payload)

    def submit_label(self, worker: bytes, job: JobHandle, sample_id: int, label: int) -> Receipt:
        payload = encode_fields(("u64", "u64"), (sample_id, label))
        return self.ledger.submit(worker, job.instance, "submit_label", payload)

    def submit_label_zk(self, sender: bytes, job: JobHandle, public, proof: Proof) -> Receipt:
        payload = encode_fields(
            SUBMIT_ZK_SCHEMA,
            (
                public.root,
                public.nullifier,
                public.job_id,
                public.new_commitment,
                public.label_commitment,
                public.sample_id,
                public.label,
                proof.encode(),
            ),
        )
        return self.ledger.submit(sender, job.instance, "submit_label_zk", payload)

    def close_labeling(self, al_server: bytes, job: JobHandle) -> Receipt:
        return self.ledger.submit(al_server, job.instance, "close_labeling", b"")

    def set_truth(self, al_server: bytes, job: JobHandle, entries: list[tuple[int, int]]) -> Receipt:
        payload = encode_fields(("pairs",), (entries,))
        return self.ledger.submit(al_server, job.score, "set_truth", payload)

    def claim_score_plain(self, worker: bytes, job: JobHandle) -> Receipt:
        return self.ledger.submit(worker, job.score, "claim_score", b"")

    def claim_score_zk(self, sender: bytes, job: JobHandle, public, proof: Proof) -> Receipt:
        payload = encode_fields(
            CLAIM_ZK_SCHEMA,
            (
                public.job_id,
                list(public.truth),
                list(public.recorded_commitments),
                public.claimed_correct,
                public.claimed_total,
                public.payout_address,
                proof.encode(),
            ),
        )
        return self.ledger.submit(sender, job.score, "claim_score", payload)

    def distribute_rewards(self, caller: bytes, job: JobHandle) -> Receipt:
        call = "close_claims" if job.zk else "distribute_rewards"
        return self.ledger.submit(caller, job.score, call, b"")

    # ------------------------------------------------------- state snapshots

    def job_phase(self, job: JobHandle) -> str:
        return self.ledger.read_storage(job.instance, "phase")

    def tree_leaves(self, job: JobHandle) -> list[bytes]:
        snapshot = self.ledger.storage_snapshot(job.instance)
        size = snapshot.get(("mt", "size"), 0)
        return [snapshot[("mt", 0, i)] for i in range(size)]

    def recorded_commitments(self, job: JobHandle) -> list[bytes]:
        return self.ledger.read_storage(job.instance, "recorded", [])

    def truth_table(self, job: JobHandle) -> dict[int, int]:
        entries = self.ledger.read_storage(job.score, "truth_list", [])
        return {sid: label for sid, label in entries}

    def payouts(self, job: JobHandle) -> tuple[list[tuple[bytes, int]], int]:
        snapshot = self.ledger.storage_snapshot(job.score)
        order = snapshot.get("payout_order", [])
        payouts = [(addr, snapshot[("payout", addr)]) for addr in order]
        return payouts, snapshot.get("refund", 0)


class EventPump:
    """Delivers ledger events to handlers in seq order until quiescent."""

    def __init__(self, system: System):
        self.system = system
        self.handlers: list = []  # objects with on_event(system, event)
        self.cursor = 0

    def register(self, handler) -> None:
        self.handlers.append(handler)

    def pump(self, max_events: int = 100_000) -> int:
        """Process events (including ones produced while processing) until no
        new ones appear. Returns the number of events processed."""
        processed = 0
        while self.cursor < len(self.system.ledger.events):
            event: Event = self.system.ledger.events[self.cursor]
            self.cursor += 1
            processed += 1
            if processed > max_events:
                raise RuntimeError("event pump runaway")
            for handler in self.handlers:
                handler.on_event(self.system, event)
        return processed
