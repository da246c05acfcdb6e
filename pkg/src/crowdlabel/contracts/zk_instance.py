"""Anonymous job instance: join-commitment accumulator, nullifier ledger,
and proof-gated label submission with commitment chaining."""

from __future__ import annotations

from ..encoding import EncodingError, encode_fields
from ..ledger.state import ContractRevert
from ..zk.backend import Proof, get_backend
from ..zk.merkle import MerkleTree, TreeFull, zero_levels
from ..zk.statements import MembershipPublic
from .base import ANON, PHASE_LABELING, PHASE_RECRUITING
from .instance import JobInstance

RECENT_ROOTS = 64


class ZKJobInstance(JobInstance):
    TEMPLATE_ID = "ZKJobInstance"
    CONSTRUCTOR_SCHEMA = JobInstance.CONSTRUCTOR_SCHEMA + ("u64",)  # + merkle depth
    CALLS = dict(JobInstance.CALLS)
    CALLS.update(
        {
            "join": (("b32",), "join_zk"),
            "submit_label_zk": (
                ("b32", "b32", "u64", "b32", "b32", "u64", "u64", "bytes"),
                "submit_label_zk",
            ),
            "recorded_commitments": ((), "recorded_commitments"),
        }
    )
    del CALLS["submit_label"]  # plain submissions are not part of this template

    def constructor(self, ctx, *args) -> None:
        *base_args, depth = args
        super().constructor(ctx, *base_args)
        zeros = zero_levels(depth, ctx.hash)
        ctx.storage["depth"] = depth
        ctx.storage["zeros"] = zeros
        ctx.storage["recorded"] = []  # label commitments, submission order
        ctx.storage["nullifier_count"] = 0
        tree = self._tree(ctx)
        ctx.storage["recent_roots"] = [tree.root()]

    def _tree(self, ctx) -> MerkleTree:
        return MerkleTree(
            depth=ctx.storage["depth"],
            store=ctx.storage,
            hash_fn=ctx.hash,
            zeros=ctx.storage["zeros"],
        )

    def _push_root(self, ctx, root: bytes) -> None:
        roots = ctx.storage["recent_roots"] + [root]
        ctx.storage["recent_roots"] = roots[-RECENT_ROOTS:]

    def _append_commitment(self, ctx, commitment: bytes) -> tuple[int, bytes]:
        ctx.require(("leaf_seen", commitment) not in ctx.storage, "DuplicateCommitment")
        tree = self._tree(ctx)
        try:
            leaf_index, new_root = tree.append(commitment)
        except TreeFull:
            raise ContractRevert("TreeFull")
        ctx.storage[("leaf_seen", commitment)] = 1
        self._push_root(ctx, new_root)
        return leaf_index, new_root

    # -------------------------------------------------------------- joining

    def join_zk(self, ctx, commitment: bytes) -> None:
        ctx.require(ctx.storage["phase"] in (PHASE_RECRUITING, PHASE_LABELING), "WrongPhase")
        leaf_index, new_root = self._append_commitment(ctx, commitment)
        ctx.emit(
            "Joined",
            encode_fields(
                ("u64", "u64", "b32"),
                (ctx.storage["job_id"], leaf_index, new_root),
            ),
        )

    # ------------------------------------------------------------ submitting

    def submit_label_zk(
        self,
        ctx,
        root: bytes,
        nullifier: bytes,
        job_id: int,
        new_commitment: bytes,
        label_commitment: bytes,
        sample_id: int,
        label: int,
        proof_bytes: bytes,
    ) -> None:
        self._check_sample_open(ctx, sample_id)
        ctx.require(label < ctx.storage["num_classes"], "BadLabel")
        ctx.require(job_id == ctx.storage["job_id"], "InvalidProof")
        ctx.require(root in ctx.storage["recent_roots"], "UnknownRoot")
        ctx.require(("nullifier", nullifier) not in ctx.storage, "NullifierUsed")

        try:
            proof = Proof.decode(proof_bytes)
        except EncodingError:
            raise ContractRevert("InvalidProof")
        backend = get_backend(proof.backend_id)
        ctx.require(backend is not None, "InvalidProof")
        public = MembershipPublic(
            root=root,
            nullifier=nullifier,
            job_id=job_id,
            new_commitment=new_commitment,
            label_commitment=label_commitment,
            sample_id=sample_id,
            label=label,
        )
        ctx.charge_proof_verify()
        ctx.require(backend.verify_membership(public, proof), "InvalidProof")

        ctx.storage[("nullifier", nullifier)] = 1
        ctx.storage["nullifier_count"] = ctx.storage["nullifier_count"] + 1
        ctx.storage[("votes", sample_id)] = ctx.storage[("votes", sample_id)] + [(ANON, label)]
        ctx.storage["recorded"] = ctx.storage["recorded"] + [label_commitment]
        self._append_commitment(ctx, new_commitment)
        if len(ctx.storage[("votes", sample_id)]) == ctx.storage[("quota", sample_id)]:
            self._aggregate(ctx, sample_id)

    # ---------------------------------------------------------------- views

    def recorded_commitments(self, ctx) -> list[bytes]:
        return list(ctx.storage["recorded"])
