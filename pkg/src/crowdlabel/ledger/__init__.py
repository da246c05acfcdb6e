"""Deterministic single-node simulated chain with gas metering and an event log."""

from .state import (
    ZERO_ADDRESS,
    DEPLOY_TARGET,
    Address,
    Event,
    GasSchedule,
    Receipt,
    Transaction,
    LedgerError,
    BadNonce,
    InvalidSender,
    UnknownTarget,
    UnknownTemplate,
    ContractRevert,
    derive_contract_address,
    named_address,
)
from .chain import Ledger, Subscription, CallContext, MeteredStorage
from .config import parse_kv_text, load_kv_file, schedule_from_config

__all__ = [
    "ZERO_ADDRESS",
    "DEPLOY_TARGET",
    "Address",
    "Event",
    "GasSchedule",
    "Receipt",
    "Transaction",
    "LedgerError",
    "BadNonce",
    "InvalidSender",
    "UnknownTarget",
    "UnknownTemplate",
    "ContractRevert",
    "derive_contract_address",
    "named_address",
    "Ledger",
    "Subscription",
    "CallContext",
    "MeteredStorage",
    "parse_kv_text",
    "load_kv_file",
    "schedule_from_config",
]
