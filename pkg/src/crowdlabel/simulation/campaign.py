"""Campaign orchestration: wire ledger, contracts, AL server, and worker
agents into one reproducible run with collected metrics.

A campaign executes one job per configured mode on a single ledger
("both" runs the plain job to completion, then the anonymous one), which
puts all six contract templates into one gas report.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path

from ..alserver.dataset import Dataset, Store, make_blobs
from ..alserver.model import TrainConfig
from ..alserver.session import ALServer, RoundRecord
from ..ledger import GasSchedule, named_address
from ..ledger.config import load_kv_file, schedule_from_config
from ..runtime import EventPump, System
from .workers import WorkerPool, WorkerProfile


class ConfigInvalid(ValueError):
    pass


@dataclass
class CampaignConfig:
    rng_seed: int = 42
    strategy: str = "entropy"  # entropy | random
    mode: str = "both"  # plain | zk | both
    dataset: Dataset | None = None
    batch_size: int = 5
    num_rounds: int = 3
    labels_per_sample: int = 3
    reward_pool: int = 1000
    volume_weighted: bool = False
    workers: list[WorkerProfile] | None = None  # None -> default roster; [] means none
    schedule: GasSchedule | None = None
    merkle_depth: int = 16
    heldout_fraction: float = 0.25
    train: TrainConfig = field(default_factory=TrainConfig)

    def __post_init__(self):
        if self.dataset is None:
            self.dataset = make_blobs()
        if self.workers is None:
            self.workers = default_roster(5, 0.9)

    def num_classes(self) -> int:
        return self.dataset.num_classes()

    def validate(self) -> None:
        if self.strategy not in ("entropy", "random"):
            raise ConfigInvalid(f"unknown strategy {self.strategy!r}")
        if self.mode not in ("plain", "zk", "both"):
            raise ConfigInvalid(f"unknown mode {self.mode!r}")
        if len(self.workers) < self.labels_per_sample:
            raise ConfigInvalid(
                f"{len(self.workers)} workers cannot supply {self.labels_per_sample} votes per sample"
            )
        if self.dataset.hidden_labels is None:
            raise ConfigInvalid("campaign dataset needs hidden labels to drive workers")
        queryable = len(self.dataset.sample_ids)
        heldout = round(queryable * self.heldout_fraction)
        if self.batch_size * self.num_rounds > queryable - heldout:
            raise ConfigInvalid("label budget exceeds the queryable pool")
        ids = set(self.dataset.sample_ids)
        if len(ids) != len(self.dataset.sample_ids):
            raise ConfigInvalid("duplicate sample ids")

    @classmethod
    def from_kv(cls, kv: dict[str, str]) -> "CampaignConfig":
        dataset = dataset_from_kv(kv)
        n = int(kv.get("workers.count", "5"))
        if "workers.accuracies" in kv:
            accuracies = [float(a) for a in kv["workers.accuracies"].split(",")]
        else:
            accuracies = [float(kv.get("workers.accuracy", "0.9"))] * n
        fresh = kv.get("workers.fresh_address", "true").lower() == "true"
        roster = [
            WorkerProfile(f"w{i}", accuracies[i], secret_seed=1000 + i, fresh_address_per_submission=fresh)
            for i in range(len(accuracies))
        ]
        depth = int(kv.get("merkle_depth", "16"))
        return cls(
            rng_seed=int(kv.get("rng_seed", "42")),
            strategy=kv.get("strategy", "entropy"),
            mode=kv.get("mode", "both"),
            dataset=dataset,
            batch_size=int(kv.get("job.batch_size", "5")),
            num_rounds=int(kv.get("job.num_rounds", "3")),
            labels_per_sample=int(kv.get("job.labels_per_sample", "3")),
            reward_pool=int(kv.get("job.reward_pool", "1000")),
            volume_weighted=kv.get("job.volume_weighted", "false").lower() == "true",
            workers=roster,
            schedule=schedule_from_config(kv, depth),
            merkle_depth=depth,
        )

    @classmethod
    def from_file(cls, path: str | Path) -> "CampaignConfig":
        return cls.from_kv(load_kv_file(path))


def default_roster(n: int, accuracy: float) -> list[WorkerProfile]:
    return [WorkerProfile(f"w{i}", accuracy, secret_seed=1000 + i) for i in range(n)]


def dataset_from_kv(kv: dict[str, str]) -> Dataset:
    kind = kv.get("dataset.kind", "blobs")
    if kind == "blobs":
        return make_blobs(
            ref=kv.get("dataset.ref", "blobs"),
            n_samples=int(kv.get("dataset.samples", "200")),
            separation=float(kv.get("dataset.separation", "2.0")),
            seed=int(kv.get("dataset.seed", "7")),
            num_classes=int(kv.get("dataset.classes", "2")),
        )
    if kind == "csv":
        path = Path(kv["dataset.path"])
        ref = kv.get("dataset.ref", path.stem)
        return Dataset.from_csv(ref, path.read_text(encoding="utf-8"))
    raise ConfigInvalid(f"unknown dataset.kind {kind!r}")


@dataclass
class WorkerResult:
    worker_id: str
    true_accuracy: float
    correct: int
    total: int
    payout: int

    @property
    def measured_accuracy(self) -> float:
        return self.correct / self.total if self.total else 0.0


@dataclass
class JobMetrics:
    job_id: int
    mode: str  # plain | zk
    rounds: list[RoundRecord]
    workers: list[WorkerResult]
    refund: int
    aggregated: dict[int, int]

    @property
    def final_heldout_accuracy(self) -> float:
        return self.rounds[-1].heldout_accuracy if self.rounds else float("nan")


@dataclass
class CampaignMetrics:
    jobs: list[JobMetrics]
    gas: dict[tuple[str, str], dict[str, float]]
    event_count: int
    runtime_seconds: float  # in-memory only; never serialized into artifacts

    def job(self, mode: str) -> JobMetrics:
        return next(j for j in self.jobs if j.mode == mode)

    def metrics_csv(self) -> str:
        lines = ["job_id,mode,worker_id,true_accuracy,correct,total,measured_accuracy,payout"]
        for job in self.jobs:
            for w in job.workers:
                lines.append(
                    f"{job.job_id},{job.mode},{w.worker_id},{w.true_accuracy:.6f},"
                    f"{w.correct},{w.total},{w.measured_accuracy:.6f},{w.payout}"
                )
        return "\n".join(lines) + "\n"

    def gas_csv(self) -> str:
        lines = ["template,call,count,total_gas,mean_gas"]
        for (template, call) in sorted(self.gas):
            row = self.gas[(template, call)]
            lines.append(
                f"{template},{call},{row['count']},{row['total_gas']},{row['mean_gas']:.2f}"
            )
        return "\n".join(lines) + "\n"

    def summary_lines(self) -> list[str]:
        lines = ["job_id,mode,round,pool_size,heldout_accuracy,cumulative_gas"]
        for job in self.jobs:
            for r in job.rounds:
                lines.append(
                    f"{job.job_id},{job.mode},{r.round_no},{r.pool_size},"
                    f"{r.heldout_accuracy:.6f},{r.cumulative_gas}"
                )
        return lines


def run_campaign(config: CampaignConfig, store_dir: str | Path | None = None) -> tuple[CampaignMetrics, System]:
    """Execute the configured campaign; returns metrics plus the final system
    (callers export dumps/event logs from it)."""
    config.validate()
    started = time.perf_counter()

    store = Store(store_dir)
    store.add_dataset(config.dataset)
    system = System(config.schedule, config.merkle_depth)
    al_address = named_address("alserver")
    requester = named_address("requester")
    server = ALServer(
        store,
        al_address,
        strategy=config.strategy,
        train_config=config.train,
        selection_seed=config.rng_seed,
        heldout_fraction=config.heldout_fraction,
        auto_finalize=True,
    )
    pool = WorkerPool(config.workers, config.dataset, config.rng_seed)
    pump = EventPump(system)
    pump.register(pool)  # workers react first: claims land before the window closes
    pump.register(server)

    modes = ["plain", "zk"] if config.mode == "both" else [config.mode]
    jobs = []
    for mode in modes:
        handle = system.create_job(
            requester,
            config.dataset.ref,
            config.num_classes(),
            config.batch_size,
            config.num_rounds,
            config.labels_per_sample,
            config.reward_pool,
            mode == "zk",
            al_address,
            config.volume_weighted,
        )
        session = server.run_session(system, pump, handle.job_id)
        jobs.append(collect_job_metrics(system, pool, config, handle, session, mode))

    metrics = CampaignMetrics(
        jobs=jobs,
        gas=system.ledger.gas_report(),
        event_count=len(system.ledger.events),
        runtime_seconds=time.perf_counter() - started,
    )
    return metrics, system


def collect_job_metrics(system, pool, config, handle, session, mode) -> JobMetrics:
    score_state = system.ledger.storage_snapshot(handle.score)
    results = []
    for profile in config.workers:
        if mode == "zk":
            payout_addr = profile.payout_address(config.rng_seed, handle.job_id)
            keyring = pool.keyrings.get((profile.worker_id, handle.job_id))
            truth = system.truth_table(handle)
            correct = keyring.correct_count(truth) if keyring else 0
            total = len(keyring.history) if keyring else 0
            payout = score_state.get(("payout", payout_addr), 0)
            claim = next(
                (c for c in score_state.get("claims", []) if c[0] == payout_addr), None
            )
            if claim is not None:
                # the contract-recorded claim must equal the local recount
                assert (claim[1], claim[2]) == (correct, total)
        else:
            correct, total = score_state.get(("score", profile.address), (0, 0))
            payout = score_state.get(("payout", profile.address), 0)
        results.append(WorkerResult(profile.worker_id, profile.accuracy, correct, total, payout))
    return JobMetrics(
        job_id=handle.job_id,
        mode=mode,
        rounds=list(session.rounds),
        workers=results,
        refund=score_state.get("refund", 0),
        aggregated=dict(session.labeled),
    )
