"""Job registry: validates job specs, escrows reward pools, and drives the
factory to deploy each job's instance/score contract pair."""

from __future__ import annotations

from ..encoding import encode_fields
from .base import Contract

INSTANCE_SCHEMA = ("u64", "b32", "b32", "b32", "u64", "u64", "u64", "u64")
ZK_INSTANCE_SCHEMA = INSTANCE_SCHEMA + ("u64",)
SCORE_SCHEMA = ("u64", "b32", "b32", "b32", "u64", "b32", "u64")


class JobManagement(Contract):
    TEMPLATE_ID = "JobManagement"
    CONSTRUCTOR_SCHEMA = ("b32",)  # factory address
    CALLS = {
        "create_job": (
            ("bytes", "u64", "u64", "u64", "u64", "u64", "u64", "b32", "u64"),
            "create_job",
        ),
    }

    def constructor(self, ctx, factory: bytes) -> None:
        ctx.storage["factory"] = factory
        ctx.storage["job_count"] = 0

    def create_job(
        self,
        ctx,
        dataset_ref: bytes,
        num_classes: int,
        batch_size: int,
        num_rounds: int,
        labels_per_sample: int,
        reward_pool: int,
        zk_mode: int,
        al_server: bytes,
        volume_weighted: int,
    ) -> int:
        ctx.require(num_classes >= 2, "InvalidSpec")
        ctx.require(batch_size >= 1, "InvalidSpec")
        ctx.require(num_rounds >= 1, "InvalidSpec")
        ctx.require(labels_per_sample >= 1 and labels_per_sample % 2 == 1, "InvalidSpec")
        ctx.require(zk_mode in (0, 1), "InvalidSpec")
        ctx.require(volume_weighted in (0, 1), "InvalidSpec")
        ctx.require(al_server != bytes(32), "InvalidSpec")

        job_id = ctx.storage["job_count"] + 1
        ctx.storage["job_count"] = job_id
        requester = ctx.caller
        factory = ctx.storage["factory"]

        instance_tid = "ZKJobInstance" if zk_mode else "JobInstance"
        score_tid = "ZKJobScore" if zk_mode else "JobScore"
        instance_args = (
            job_id, ctx.self_address, requester, al_server,
            num_classes, batch_size, num_rounds, labels_per_sample,
        )
        if zk_mode:
            instance_args = instance_args + (ctx.ledger.merkle_depth,)
            instance_params = encode_fields(ZK_INSTANCE_SCHEMA, instance_args)
        else:
            instance_params = encode_fields(INSTANCE_SCHEMA, instance_args)
        instance_addr = ctx.call(
            factory, "instantiate", instance_tid.encode("utf-8"), job_id, instance_params
        )
        score_params = encode_fields(
            SCORE_SCHEMA,
            (job_id, ctx.self_address, requester, al_server, reward_pool, instance_addr, volume_weighted),
        )
        score_addr = ctx.call(
            factory, "instantiate", score_tid.encode("utf-8"), job_id, score_params
        )
        ctx.call(instance_addr, "set_score", score_addr)
        ctx.call(instance_addr, "activate")

        ctx.storage[("job", job_id, "instance")] = instance_addr
        ctx.storage[("job", job_id, "score")] = score_addr
        ctx.storage[("job", job_id, "zk")] = zk_mode
        ctx.storage[("job", job_id, "dataset")] = dataset_ref
        ctx.storage[("job", job_id, "pool")] = reward_pool
        ctx.storage[("job", job_id, "requester")] = requester
        ctx.storage[("job", job_id, "al_server")] = al_server

        ctx.emit(
            "JobCreated",
            encode_fields(
                ("u64", "bytes", "b32", "b32"),
                (job_id, dataset_ref, instance_addr, score_addr),
            ),
        )
        return job_id
