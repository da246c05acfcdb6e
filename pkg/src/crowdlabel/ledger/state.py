"""Ledger domain types: addresses, transactions, receipts, events, gas schedule."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from ..encoding import enc_bytes, enc_u64

Address = bytes  # 32-byte opaque identifier

ZERO_ADDRESS: Address = bytes(32)
DEPLOY_TARGET: Address = b"\xff" * 32  # sentinel target for deployment transactions


class LedgerError(Exception):
    """Transaction rejected before execution; no receipt, no state change."""


class BadNonce(LedgerError):
    pass


class InvalidSender(LedgerError):
    pass


class UnknownTarget(LedgerError):
    pass


class UnknownTemplate(LedgerError):
    pass


class ContractRevert(Exception):
    """Raised inside contract execution; surfaces as a Reverted receipt."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


def named_address(label: str) -> Address:
    """Deterministic account address for a human-readable label."""
    return hashlib.sha256(b"account:" + label.encode("utf-8")).digest()


def derive_contract_address(deployer: Address, nonce: int) -> Address:
    return hashlib.sha256(deployer + enc_u64(nonce)).digest()


@dataclass(frozen=True)
class Transaction:
    sender: Address
    target: Address  # contract address or DEPLOY_TARGET
    call_name: str
    payload: bytes
    nonce: int

    def tx_hash(self) -> bytes:
        blob = (
            self.sender
            + self.target
            + enc_bytes(self.call_name.encode("utf-8"))
            + enc_bytes(self.payload)
            + enc_u64(self.nonce)
        )
        return hashlib.sha256(blob).digest()


@dataclass(frozen=True)
class Event:
    emitter: Address
    name: str
    payload: bytes
    seq: int


@dataclass
class Receipt:
    tx_hash: bytes
    status: str  # "success" | "reverted"
    reason: str | None
    gas_used: int
    events: tuple[Event, ...]
    block_height: int
    template_id: str  # template of the target (or deployed template)
    call_name: str
    deploys: tuple[tuple[str, int], ...] = ()  # nested deploys: (template, gas share)
    gas_trace: tuple[tuple[str, int], ...] = field(default=(), repr=False, compare=False)

    @property
    def success(self) -> bool:
        return self.status == "success"


DEFAULT_SCHEDULE = {
    "tx_base": 21000,
    "storage_write_new": 20000,
    "storage_write_update": 5000,
    "storage_read": 200,
    "hash_per_word": 36,
    "event_base": 375,
    "event_per_byte": 8,
    "deploy_base": 32000,
    "deploy_per_state_slot": 1000,
    "proof_verify": 220000,
}


@dataclass(frozen=True)
class GasSchedule:
    tx_base: int = DEFAULT_SCHEDULE["tx_base"]
    storage_write_new: int = DEFAULT_SCHEDULE["storage_write_new"]
    storage_write_update: int = DEFAULT_SCHEDULE["storage_write_update"]
    storage_read: int = DEFAULT_SCHEDULE["storage_read"]
    hash_per_word: int = DEFAULT_SCHEDULE["hash_per_word"]
    event_base: int = DEFAULT_SCHEDULE["event_base"]
    event_per_byte: int = DEFAULT_SCHEDULE["event_per_byte"]
    deploy_base: int = DEFAULT_SCHEDULE["deploy_base"]
    deploy_per_state_slot: int = DEFAULT_SCHEDULE["deploy_per_state_slot"]
    proof_verify: int = DEFAULT_SCHEDULE["proof_verify"]

    def validate(self, merkle_depth: int = 16) -> None:
        for name in DEFAULT_SCHEDULE:
            if getattr(self, name) <= 0:
                raise ValueError(f"gas schedule entry {name} must be strictly positive")
        if self.proof_verify <= self.hash_per_word * merkle_depth:
            raise ValueError(
                "proof_verify must exceed hash_per_word * merkle depth "
                f"({self.proof_verify} <= {self.hash_per_word} * {merkle_depth})"
            )

    def as_dict(self) -> dict[str, int]:
        return {name: getattr(self, name) for name in DEFAULT_SCHEDULE}
