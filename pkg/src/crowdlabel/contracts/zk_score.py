"""Anonymous score contract: performance-proof claims against the posted
truth, single-spend label commitments, payouts to claim addresses."""

from __future__ import annotations

from ..encoding import EncodingError, encode_fields
from ..ledger.state import ContractRevert
from ..zk.backend import Proof, get_backend
from ..zk.statements import PerformancePublic
from .score import ScoreBase


class ZKJobScore(ScoreBase):
    TEMPLATE_ID = "ZKJobScore"
    CALLS = {
        "set_truth": (("pairs",), "set_truth"),
        "claim_score": (
            ("u64", "pairs", "b32list", "u64", "u64", "b32", "bytes"),
            "claim_score",
        ),
        "close_claims": ((), "close_claims"),
    }

    def constructor(self, ctx, *args) -> None:
        super().constructor(ctx, *args)
        ctx.storage["claims"] = []  # (payout_address, correct, total), claim order
        ctx.storage["spent_count"] = 0

    def set_truth(self, ctx, entries: list[tuple[int, int]]) -> None:
        # Anonymous jobs score via claims; no per-worker accuracy exists on-chain.
        self._post_truth(ctx, entries)

    def claim_score(
        self,
        ctx,
        job_id: int,
        truth: list[tuple[int, int]],
        recorded: list[bytes],
        claimed_correct: int,
        claimed_total: int,
        payout_address: bytes,
        proof_bytes: bytes,
    ) -> None:
        ctx.require(ctx.storage["truth_posted"] == 1, "TruthNotPosted")
        ctx.require(ctx.storage["distributed"] == 0, "ClaimWindowClosed")
        ctx.require(job_id == ctx.storage["job_id"], "InvalidProof")
        ctx.require(sorted(truth) == ctx.storage["truth_list"], "InvalidProof")
        on_chain = ctx.call(ctx.storage["instance"], "recorded_commitments")
        ctx.require(sorted(recorded) == sorted(on_chain), "InvalidProof")

        try:
            proof = Proof.decode(proof_bytes)
        except EncodingError:
            raise ContractRevert("InvalidProof")
        backend = get_backend(proof.backend_id)
        ctx.require(backend is not None, "InvalidProof")
        public = PerformancePublic.canonical(
            job_id=job_id,
            truth=dict(truth),
            recorded_commitments=recorded,
            claimed_correct=claimed_correct,
            claimed_total=claimed_total,
            payout_address=payout_address,
        )
        ctx.charge_proof_verify()
        ctx.require(backend.verify_performance(public, proof), "InvalidProof")

        claimed = backend.claimed_commitments(proof)
        for commitment in claimed:
            ctx.require(("spent", commitment) not in ctx.storage, "CommitmentAlreadyClaimed")
        for commitment in claimed:
            ctx.storage[("spent", commitment)] = 1
        ctx.storage["spent_count"] = ctx.storage["spent_count"] + len(claimed)
        ctx.storage["claims"] = ctx.storage["claims"] + [(payout_address, claimed_correct, claimed_total)]
        ctx.emit(
            "ScoreClaimed",
            encode_fields(
                ("u64", "b32", "u64", "u64"),
                (ctx.storage["job_id"], payout_address, claimed_correct, claimed_total),
            ),
        )

    def close_claims(self, ctx) -> None:
        ctx.require(
            ctx.caller in (ctx.storage["requester"], ctx.storage["al_server"]), "Unauthorized"
        )
        claims = ctx.storage["claims"]
        recipients = [addr for addr, _, _ in claims]
        weights = [self._weight(ctx, correct, total) for _, correct, total in claims]
        self._distribute(ctx, recipients, weights)
