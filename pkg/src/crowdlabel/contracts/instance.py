"""Job instance: lifecycle phases, worker joins, round batches, label votes,
and majority-vote aggregation with one-extra-vote tie escalation."""

from __future__ import annotations

from ..encoding import encode_fields
from .base import (
    ANON,
    Contract,
    PHASE_COMPLETED,
    PHASE_CREATED,
    PHASE_EVALUATING,
    PHASE_LABELING,
    PHASE_RECRUITING,
)

PENDING = -1


def majority_winner(counts: list[int]) -> int:
    """Unique argmax of vote counts, or PENDING when the maximum ties."""
    best = max(counts)
    winners = [label for label, c in enumerate(counts) if c == best]
    return winners[0] if len(winners) == 1 else PENDING


class JobInstance(Contract):
    TEMPLATE_ID = "JobInstance"
    CONSTRUCTOR_SCHEMA = ("u64", "b32", "b32", "b32", "u64", "u64", "u64", "u64")
    CALLS = {
        "activate": ((), "activate"),
        "set_score": (("b32",), "set_score"),
        "join": ((), "join"),
        "open_round": (("u64", "u64list"), "open_round"),
        "submit_label": (("u64", "u64"), "submit_label"),
        "aggregate": (("u64",), "aggregate_call"),
        "close_labeling": ((), "close_labeling"),
        "mark_completed": ((), "mark_completed"),
        "get_phase": ((), "get_phase"),
        "labeled_samples": ((), "labeled_samples"),
        "joined_workers": ((), "joined_workers"),
        "worker_votes": (("b32",), "worker_votes"),
    }

    def constructor(
        self, ctx, job_id, management, requester, al_server,
        num_classes, batch_size, num_rounds, labels_per_sample,
    ) -> None:
        ctx.storage["job_id"] = job_id
        ctx.storage["management"] = management
        ctx.storage["requester"] = requester
        ctx.storage["al_server"] = al_server
        ctx.storage["num_classes"] = num_classes
        ctx.storage["batch_size"] = batch_size
        ctx.storage["num_rounds"] = num_rounds
        ctx.storage["labels_per_sample"] = labels_per_sample
        ctx.storage["phase"] = PHASE_CREATED
        ctx.storage["round"] = 0
        ctx.storage["score"] = b""
        ctx.storage["joined"] = []  # join-order list of worker addresses
        ctx.storage["labeled_count"] = 0
        ctx.storage["open_count"] = 0

    # ----------------------------------------------------------- lifecycle

    def activate(self, ctx) -> None:
        ctx.require(ctx.caller == ctx.storage["management"], "Unauthorized")
        ctx.require(ctx.storage["phase"] == PHASE_CREATED, "WrongPhase")
        ctx.storage["phase"] = PHASE_RECRUITING

    def set_score(self, ctx, score: bytes) -> None:
        ctx.require(ctx.caller == ctx.storage["management"], "Unauthorized")
        ctx.require(ctx.storage["score"] == b"", "AlreadySet")
        ctx.storage["score"] = score

    def close_labeling(self, ctx) -> None:
        ctx.require(ctx.caller == ctx.storage["al_server"], "Unauthorized")
        ctx.require(ctx.storage["phase"] == PHASE_LABELING, "WrongPhase")
        ctx.require(ctx.storage["round"] == ctx.storage["num_rounds"], "WrongPhase")
        ctx.require(ctx.storage["open_count"] == 0, "WrongPhase")
        ctx.storage["phase"] = PHASE_EVALUATING
        ctx.emit("LabelingClosed", encode_fields(("u64",), (ctx.storage["job_id"],)))

    def mark_completed(self, ctx) -> None:
        ctx.require(ctx.caller == ctx.storage["score"], "Unauthorized")
        ctx.require(ctx.storage["phase"] == PHASE_EVALUATING, "WrongPhase")
        ctx.storage["phase"] = PHASE_COMPLETED

    # -------------------------------------------------------------- workers

    def join(self, ctx) -> None:
        ctx.require(ctx.storage["phase"] in (PHASE_RECRUITING, PHASE_LABELING), "WrongPhase")
        ctx.require(("member", ctx.sender) not in ctx.storage, "AlreadyJoined")
        ctx.storage[("member", ctx.sender)] = 1
        ctx.storage[("votes_of", ctx.sender)] = []
        ctx.storage["joined"] = ctx.storage["joined"] + [ctx.sender]
        ctx.emit("WorkerJoined", encode_fields(("u64",), (ctx.storage["job_id"],)))

    # --------------------------------------------------------------- rounds

    def open_round(self, ctx, round_no: int, sample_ids: list[int]) -> None:
        ctx.require(ctx.caller == ctx.storage["al_server"], "Unauthorized")
        phase = ctx.storage["phase"]
        current = ctx.storage["round"]
        if round_no == 1:
            ctx.require(phase == PHASE_RECRUITING, "WrongPhase")
        else:
            ctx.require(phase == PHASE_LABELING and round_no == current + 1, "WrongPhase")
            ctx.require(ctx.storage["open_count"] == 0, "WrongPhase")
        ctx.require(round_no <= ctx.storage["num_rounds"], "WrongPhase")
        ctx.require(len(sample_ids) == ctx.storage["batch_size"], "BadBatch")
        ctx.require(len(set(sample_ids)) == len(sample_ids), "BadBatch")
        for sid in sample_ids:
            ctx.require(("quota", sid) not in ctx.storage, "BadBatch")
        quota = ctx.storage["labels_per_sample"]
        for sid in sample_ids:
            ctx.storage[("quota", sid)] = quota
            ctx.storage[("votes", sid)] = []
        ctx.storage["round"] = round_no
        ctx.storage["phase"] = PHASE_LABELING
        ctx.storage[("round_samples", round_no)] = list(sample_ids)
        ctx.storage["open_count"] = len(sample_ids)
        ctx.emit(
            "RoundOpened",
            encode_fields(("u64", "u64", "u64list"), (ctx.storage["job_id"], round_no, sample_ids)),
        )

    # --------------------------------------------------------------- labels

    def _check_sample_open(self, ctx, sample_id: int) -> None:
        ctx.require(ctx.storage["phase"] == PHASE_LABELING, "WrongPhase")
        ctx.require(("quota", sample_id) in ctx.storage, "SampleClosed")
        ctx.require(("labeled", sample_id) not in ctx.storage, "SampleClosed")
        votes = ctx.storage[("votes", sample_id)]
        ctx.require(len(votes) < ctx.storage[("quota", sample_id)], "SampleClosed")

    def submit_label(self, ctx, sample_id: int, label: int) -> None:
        self._check_sample_open(ctx, sample_id)
        ctx.require(("member", ctx.sender) in ctx.storage, "NotJoined")
        ctx.require(("voted", sample_id, ctx.sender) not in ctx.storage, "DuplicateVote")
        ctx.require(label < ctx.storage["num_classes"], "BadLabel")
        ctx.storage[("voted", sample_id, ctx.sender)] = 1
        ctx.storage[("votes", sample_id)] = ctx.storage[("votes", sample_id)] + [(ctx.sender, label)]
        ctx.storage[("votes_of", ctx.sender)] = ctx.storage[("votes_of", ctx.sender)] + [(sample_id, label)]
        if len(ctx.storage[("votes", sample_id)]) == ctx.storage[("quota", sample_id)]:
            self._aggregate(ctx, sample_id)

    def aggregate_call(self, ctx, sample_id: int) -> None:
        ctx.require(("quota", sample_id) in ctx.storage, "QuotaNotReached")
        ctx.require(("labeled", sample_id) not in ctx.storage, "QuotaNotReached")
        votes = ctx.storage[("votes", sample_id)]
        ctx.require(len(votes) == ctx.storage[("quota", sample_id)], "QuotaNotReached")
        self._aggregate(ctx, sample_id)

    def _aggregate(self, ctx, sample_id: int) -> None:
        votes = ctx.storage[("votes", sample_id)]
        counts = [0] * ctx.storage["num_classes"]
        for _, label in votes:
            counts[label] += 1
        winner = majority_winner(counts)
        if winner == PENDING:
            # Tie: re-open for one extra vote; aggregation re-runs at the new quota.
            ctx.storage[("quota", sample_id)] = len(votes) + 1
            ctx.emit(
                "LabelAggregated",
                encode_fields(
                    ("u64", "u64", "u64", "u64"),
                    (ctx.storage["job_id"], sample_id, 0, 0),
                ),
            )
            return
        ctx.storage[("labeled", sample_id)] = winner
        ctx.storage["labeled_count"] = ctx.storage["labeled_count"] + 1
        ctx.storage["open_count"] = ctx.storage["open_count"] - 1
        ctx.emit(
            "LabelAggregated",
            encode_fields(
                ("u64", "u64", "u64", "u64"),
                (ctx.storage["job_id"], sample_id, 1, winner),
            ),
        )

    # ---------------------------------------------------------------- views

    def get_phase(self, ctx) -> str:
        return ctx.storage["phase"]

    def labeled_samples(self, ctx) -> list[tuple[int, int]]:
        out = []
        for round_no in range(1, ctx.storage["round"] + 1):
            for sid in ctx.storage[("round_samples", round_no)]:
                if ("labeled", sid) in ctx.storage:
                    out.append((sid, ctx.storage[("labeled", sid)]))
        return out

    def joined_workers(self, ctx) -> list[bytes]:
        return list(ctx.storage["joined"])

    def worker_votes(self, ctx, worker: bytes) -> list[tuple[int, int]]:
        return list(ctx.storage.get(("votes_of", worker), []))
