"""Event-driven training sessions, one per job.

The server subscribes to the ledger (via the runtime pump), reacts to
JobCreated / LabelAggregated / TruthPosted, and drives the loop the other
way: open round -> await aggregated batch -> train -> next round -> close
labeling -> post model-predicted truth -> (optionally) finalize rewards.
"""

from __future__ import annotations

import hashlib
import logging
import random
from dataclasses import dataclass, field

import numpy as np

from ..encoding import decode_fields
from ..runtime import JOB_CREATED_SCHEMA, LABEL_AGGREGATED_SCHEMA, JobHandle, System
from .dataset import Dataset, Store, UnknownDataset
from .model import Model, TrainConfig, UntrainedModel, predict_labels, train
from .selection import select_batch, select_random

log = logging.getLogger(__name__)


class SessionStalled(RuntimeError):
    pass


@dataclass
class RoundRecord:
    round_no: int
    pool_size: int
    heldout_accuracy: float
    cumulative_gas: int


@dataclass
class Session:
    job: JobHandle
    dataset: Dataset
    num_classes: int
    batch_size: int
    num_rounds: int
    strategy: str
    heldout: set[int]
    model: Model
    labeled: dict[int, int] = field(default_factory=dict)
    unlabeled: set[int] = field(default_factory=set)
    pending: set[int] = field(default_factory=set)
    round_no: int = 0
    rounds: list[RoundRecord] = field(default_factory=list)
    status: str = "running"  # running | completed | stalled
    events_since_progress: int = 0

    def heldout_accuracy(self) -> float:
        if not self.dataset.hidden_labels or self.model.trained_rounds == 0:
            return float("nan")
        ids = sorted(self.heldout)
        predictions = predict_labels(self.model.weights, self.dataset.matrix(ids))
        hits = sum(1 for sid, p in zip(ids, predictions) if self.dataset.hidden_labels[sid] == p)
        return hits / len(ids)

    def predict_truth(self, sample_ids: list[int]) -> list[tuple[int, int]]:
        if self.model.trained_rounds == 0:
            raise UntrainedModel("truth prediction needs at least one trained round")
        labels = predict_labels(self.model.weights, self.dataset.matrix(sample_ids))
        return [(sid, int(label)) for sid, label in zip(sample_ids, labels)]


def stratified_heldout(dataset: Dataset, fraction: float, seed: int) -> set[int]:
    """Per-class sample of ~fraction of ids, excluded from querying."""
    digest = hashlib.sha256(f"heldout:{seed}:{dataset.ref}".encode()).digest()
    rng = random.Random(int.from_bytes(digest[:8], "big"))
    by_class: dict[int, list[int]] = {}
    for sid in sorted(dataset.sample_ids):
        cls = dataset.hidden_labels[sid] if dataset.hidden_labels else 0
        by_class.setdefault(cls, []).append(sid)
    heldout: set[int] = set()
    for ids in by_class.values():
        k = max(1, round(len(ids) * fraction))
        heldout.update(rng.sample(ids, k))
    return heldout


class ALServer:
    """Pump handler owning every session keyed by job_id."""

    def __init__(
        self,
        store: Store,
        address: bytes,
        strategy: str = "entropy",
        train_config: TrainConfig | None = None,
        selection_seed: int = 0,
        heldout_fraction: float = 0.25,
        auto_finalize: bool = True,
        stall_limit: int = 10_000,
    ):
        self.store = store
        self.address = address
        self.strategy = strategy
        self.train_config = train_config or TrainConfig()
        self.selection_seed = selection_seed
        self.heldout_fraction = heldout_fraction
        self.auto_finalize = auto_finalize
        self.stall_limit = stall_limit
        self.sessions: dict[int, Session] = {}
        self.errors: list[str] = []

    # ---------------------------------------------------------------- events

    def on_event(self, system: System, event) -> None:
        if event.name == "JobCreated":
            self._on_job_created(system, event)
        elif event.name == "LabelAggregated":
            self._on_label_aggregated(system, event)
        elif event.name == "TruthPosted" and self.auto_finalize:
            job_id = decode_fields(("u64",), event.payload)[0]
            session = self.sessions.get(job_id)
            if session is not None:
                system.distribute_rewards(self.address, session.job)
        elif event.name == "RewardsDistributed":
            job_id = decode_fields(("u64", "u64", "u64"), event.payload)[0]
            session = self.sessions.get(job_id)
            if session is not None:
                session.status = "completed"
        else:
            job_id = self._event_job(event)
            session = self.sessions.get(job_id) if job_id is not None else None
            if session is not None and session.status == "running":
                session.events_since_progress += 1
                if session.events_since_progress > self.stall_limit:
                    session.status = "stalled"
                    raise SessionStalled(f"job {session.job.job_id}: no aggregation progress")

    @staticmethod
    def _event_job(event) -> int | None:
        try:
            return decode_fields(("u64",), event.payload[:8])[0] if len(event.payload) >= 8 else None
        except Exception:
            return None

    def run_session(self, system: System, pump, job_id: int) -> Session:
        """Drive one job's session to completion through the event pump.

        Pumps until quiescent; a session still running at quiescence has no
        way to progress (nobody left to vote), which is the stall condition.
        """
        pump.pump()
        session = self.sessions.get(job_id)
        if session is None:
            raise SessionStalled(f"job {job_id}: no session (dataset unknown?)")
        if session.status != "completed":
            session.status = "stalled"
            raise SessionStalled(f"job {job_id}: no aggregation progress at quiescence")
        return session

    def _on_job_created(self, system: System, event) -> None:
        job_id, ref_bytes, instance, score = decode_fields(JOB_CREATED_SCHEMA, event.payload)
        ref = ref_bytes.decode("utf-8")
        try:
            dataset = self.store.get_dataset(ref)
        except UnknownDataset:
            self.errors.append(f"job {job_id}: unknown dataset {ref!r}")
            log.error("job %s aborted: unknown dataset %r", job_id, ref)
            return
        snapshot = system.ledger.storage_snapshot(instance)
        zk = system.ledger.template_of(instance) == "ZKJobInstance"
        job = JobHandle(job_id, ref, instance, score, zk)
        system.jobs.setdefault(job_id, job)
        session = Session(
            job=job,
            dataset=dataset,
            num_classes=snapshot["num_classes"],
            batch_size=snapshot["batch_size"],
            num_rounds=snapshot["num_rounds"],
            strategy=self.strategy,
            heldout=stratified_heldout(dataset, self.heldout_fraction, self.selection_seed),
            model=Model.initial(snapshot["num_classes"], dataset.dim, self.train_config),
        )
        session.unlabeled = set(dataset.sample_ids) - session.heldout
        self.sessions[job_id] = session
        self._open_next_round(system, session)

    def _on_label_aggregated(self, system: System, event) -> None:
        job_id, sample_id, resolved, winner = decode_fields(LABEL_AGGREGATED_SCHEMA, event.payload)
        session = self.sessions.get(job_id)
        if session is None or session.status != "running":
            return
        if not resolved:
            return  # tie escalation in flight; the batch simply isn't done yet
        if sample_id not in session.pending:
            return
        session.pending.discard(sample_id)
        session.labeled[sample_id] = winner
        session.unlabeled.discard(sample_id)
        session.events_since_progress = 0
        if not session.pending:
            self._finish_round(system, session)

    # ----------------------------------------------------------------- steps

    def _open_next_round(self, system: System, session: Session) -> None:
        round_no = session.round_no + 1
        if session.strategy == "random":
            batch = select_random(self.selection_seed, round_no, session.unlabeled, session.batch_size)
        else:
            batch = select_batch(session.model, session.dataset, session.unlabeled, session.batch_size)
        receipt = system.open_round(self.address, session.job, round_no, batch)
        if not receipt.success:
            raise RuntimeError(f"open_round reverted: {receipt.reason}")
        session.round_no = round_no
        session.pending = set(batch)

    def _finish_round(self, system: System, session: Session) -> None:
        ids = sorted(session.labeled)
        X = session.dataset.matrix(ids)
        labels = np.asarray([session.labeled[sid] for sid in ids])
        session.model, _ = train(session.model, X, labels, self.train_config)
        self.store.save_model(session.job.job_id, session.round_no, session.model.weights)
        session.rounds.append(
            RoundRecord(
                round_no=session.round_no,
                pool_size=len(session.labeled),
                heldout_accuracy=session.heldout_accuracy(),
                cumulative_gas=sum(r.gas_used for r in system.ledger.receipts),
            )
        )
        if session.round_no < session.num_rounds:
            self._open_next_round(system, session)
            return
        receipt = system.close_labeling(self.address, session.job)
        if not receipt.success:
            raise RuntimeError(f"close_labeling reverted: {receipt.reason}")
        truth = session.predict_truth(sorted(session.labeled))
        receipt = system.set_truth(self.address, session.job, truth)
        if not receipt.success:
            raise RuntimeError(f"set_truth reverted: {receipt.reason}")
        # TruthPosted flows back through the pump; workers claim before the
        # server's own TruthPosted handler closes the window (handler order).
