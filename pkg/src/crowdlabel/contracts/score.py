"""Job score contract: truth posting, per-worker accuracy, reward payout."""

from __future__ import annotations

from ..encoding import encode_fields
from .base import Contract, PHASE_EVALUATING
from .payout import accuracy_fraction, proportional_payouts


class ScoreBase(Contract):
    """Shared truth-posting machinery for the plain and zk score contracts."""

    CONSTRUCTOR_SCHEMA = ("u64", "b32", "b32", "b32", "u64", "b32", "u64")

    def constructor(
        self, ctx, job_id, management, requester, al_server, reward_pool, instance, volume_weighted
    ) -> None:
        ctx.storage["job_id"] = job_id
        ctx.storage["management"] = management
        ctx.storage["requester"] = requester
        ctx.storage["al_server"] = al_server
        ctx.storage["reward_pool"] = reward_pool
        ctx.storage["instance"] = instance
        ctx.storage["volume_weighted"] = volume_weighted
        ctx.storage["truth_posted"] = 0
        ctx.storage["distributed"] = 0

    def _weight(self, ctx, correct: int, total: int):
        """Payout weight: plain accuracy, or accuracy x votes when the job
        was created volume-weighted (weights are then just correct counts)."""
        if ctx.storage["volume_weighted"]:
            return accuracy_fraction(correct, 1)
        return accuracy_fraction(correct, total)

    def _post_truth(self, ctx, entries: list[tuple[int, int]]) -> None:
        ctx.require(ctx.caller == ctx.storage["al_server"], "Unauthorized")
        instance = ctx.storage["instance"]
        phase = ctx.call(instance, "get_phase")
        ctx.require(phase == PHASE_EVALUATING, "WrongPhase")
        ctx.require(ctx.storage["truth_posted"] == 0, "AlreadyPosted")
        labeled = ctx.call(instance, "labeled_samples")
        labeled_ids = {sid for sid, _ in labeled}
        entry_ids = [sid for sid, _ in entries]
        ctx.require(len(entry_ids) == len(set(entry_ids)), "IncompleteTruth")
        ctx.require(set(entry_ids) == labeled_ids, "IncompleteTruth")
        for sid, truth_label in entries:
            ctx.storage[("truth", sid)] = truth_label
        ctx.storage["truth_list"] = sorted(entries)
        ctx.storage["truth_posted"] = 1
        ctx.emit("TruthPosted", encode_fields(("u64",), (ctx.storage["job_id"],)))

    def _distribute(self, ctx, recipients: list[bytes], accuracies) -> None:
        ctx.require(ctx.storage["truth_posted"] == 1, "TruthNotPosted")
        ctx.require(ctx.storage["distributed"] == 0, "AlreadyDistributed")
        pool = ctx.storage["reward_pool"]
        payouts, refund = proportional_payouts(pool, accuracies)
        for addr, amount in zip(recipients, payouts):
            ctx.storage[("payout", addr)] = amount
        ctx.storage["payout_order"] = list(recipients)
        ctx.storage["refund"] = refund
        ctx.storage["distributed"] = 1
        ctx.call(ctx.storage["instance"], "mark_completed")
        ctx.emit(
            "RewardsDistributed",
            encode_fields(
                ("u64", "u64", "u64"),
                (ctx.storage["job_id"], pool - refund, refund),
            ),
        )


class JobScore(ScoreBase):
    TEMPLATE_ID = "JobScore"
    CALLS = {
        "set_truth": (("pairs",), "set_truth"),
        "claim_score": ((), "claim_score"),
        "distribute_rewards": ((), "distribute_rewards"),
    }

    def set_truth(self, ctx, entries: list[tuple[int, int]]) -> None:
        self._post_truth(ctx, entries)
        # Plain mode scores every joined worker from their on-chain votes.
        instance = ctx.storage["instance"]
        workers = ctx.call(instance, "joined_workers")
        for addr in workers:
            votes = ctx.call(instance, "worker_votes", addr)
            correct = sum(1 for sid, label in votes if ctx.storage.get(("truth", sid)) == label)
            ctx.storage[("score", addr)] = (correct, len(votes))

    def claim_score(self, ctx) -> None:
        """Worker acknowledges their recorded accuracy after truth is posted."""
        ctx.require(ctx.storage["truth_posted"] == 1, "TruthNotPosted")
        ctx.require(ctx.storage["distributed"] == 0, "ClaimWindowClosed")
        score = ctx.storage.get(("score", ctx.sender))
        ctx.require(score is not None, "NotJoined")
        ctx.require(("claimed", ctx.sender) not in ctx.storage, "AlreadyClaimed")
        ctx.storage[("claimed", ctx.sender)] = 1
        correct, total = score
        ctx.emit(
            "ScoreClaimed",
            encode_fields(("u64", "u64", "u64"), (ctx.storage["job_id"], correct, total)),
        )

    def distribute_rewards(self, ctx) -> None:
        ctx.require(
            ctx.caller in (ctx.storage["requester"], ctx.storage["al_server"]), "Unauthorized"
        )
        workers = ctx.call(ctx.storage["instance"], "joined_workers")
        weights = []
        for addr in workers:
            correct, total = ctx.storage.get(("score", addr), (0, 0))
            weights.append(self._weight(ctx, correct, total))
        self._distribute(ctx, workers, weights)
