"""Contract factory: template storage, per-job instantiation, address registry."""

from __future__ import annotations

from ..encoding import decode_fields, EncodingError
from ..ledger.state import ContractRevert
from .base import Contract


class ContractFactory(Contract):
    TEMPLATE_ID = "ContractFactory"
    CONSTRUCTOR_SCHEMA = ()
    CALLS = {
        "set_manager": (("b32",), "set_manager"),
        "instantiate": (("bytes", "u64", "bytes"), "instantiate"),
        "instance_of": (("u64", "bytes"), "instance_of"),
    }

    def constructor(self, ctx) -> None:
        ctx.storage["deployer"] = ctx.caller
        ctx.storage["manager"] = b""
        ctx.storage["deployed_count"] = 0

    def set_manager(self, ctx, manager: bytes) -> None:
        ctx.require(ctx.caller == ctx.storage["deployer"], "Unauthorized")
        ctx.require(ctx.storage["manager"] == b"", "AlreadySet")
        ctx.storage["manager"] = manager

    def instantiate(self, ctx, template_id: bytes, job_id: int, params: bytes) -> bytes:
        ctx.require(ctx.caller == ctx.storage["manager"], "Unauthorized")
        tid = template_id.decode("utf-8")
        template = ctx.ledger.templates.get(tid)
        if template is None:
            ctx.revert("UnknownTemplate")
        try:
            init_args = decode_fields(template.CONSTRUCTOR_SCHEMA, params)
        except EncodingError:
            raise ContractRevert("MalformedCall")
        address = ctx.deploy(tid, init_args)
        ctx.storage[("deployed", job_id, tid)] = address
        ctx.storage["deployed_count"] = ctx.storage["deployed_count"] + 1
        return address

    def instance_of(self, ctx, job_id: int, template_id: bytes) -> bytes:
        return ctx.storage.get(("deployed", job_id, template_id.decode("utf-8")), b"")
