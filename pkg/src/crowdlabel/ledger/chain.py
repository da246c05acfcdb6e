"""Single-writer execution engine: dispatch, metering, events, snapshots.

Transactions execute strictly sequentially under one lock; every block holds
exactly one transaction, so block_height doubles as a logical clock. State
mutates only on success (whole-state snapshot/restore gives all-or-nothing
semantics at desk scale). Subscribers replay the append-only event log by
global sequence number.
"""

from __future__ import annotations

import copy
import hashlib
import json
import threading
from typing import Any, Iterable

from ..encoding import EncodingError, decode_fields
from .state import (
    DEPLOY_TARGET,
    ZERO_ADDRESS,
    Address,
    BadNonce,
    ContractRevert,
    Event,
    GasSchedule,
    InvalidSender,
    Receipt,
    Transaction,
    UnknownTarget,
    UnknownTemplate,
    derive_contract_address,
)


class GasMeter:
    """Accumulates itemized charges; the receipt total must equal their sum."""

    __slots__ = ("used", "trace", "suppress_storage")

    def __init__(self) -> None:
        self.used = 0
        self.trace: list[tuple[str, int]] = []
        self.suppress_storage = False

    def charge(self, label: str, amount: int) -> None:
        self.used += amount
        self.trace.append((label, amount))


class MeteredStorage:
    """Dict view that charges the meter for reads and writes.

    Constructor writes are charged in bulk (deploy_per_state_slot per slot
    initialized), so per-write charges are suppressed while a constructor
    runs.
    """

    __slots__ = ("_data", "_meter", "_schedule")

    def __init__(self, data: dict, meter: GasMeter, schedule: GasSchedule):
        self._data = data
        self._meter = meter
        self._schedule = schedule

    def __getitem__(self, key):
        self._meter.charge("storage_read", self._schedule.storage_read)
        return self._data[key]

    def get(self, key, default=None):
        self._meter.charge("storage_read", self._schedule.storage_read)
        return self._data.get(key, default)

    def __setitem__(self, key, value) -> None:
        if not self._meter.suppress_storage:
            if key in self._data:
                self._meter.charge("storage_write_update", self._schedule.storage_write_update)
            else:
                self._meter.charge("storage_write_new", self._schedule.storage_write_new)
        self._data[key] = value

    def __contains__(self, key) -> bool:
        self._meter.charge("storage_read", self._schedule.storage_read)
        return key in self._data

    def __len__(self) -> int:
        return len(self._data)

    def raw(self) -> dict:
        """Unmetered view for off-chain snapshot queries."""
        return self._data


class ContractInstance:
    __slots__ = ("template_id", "address", "storage", "contract")

    def __init__(self, template_id: str, address: Address, storage: dict, contract: Any):
        self.template_id = template_id
        self.address = address
        self.storage = storage
        self.contract = contract


class CallContext:
    """Execution environment handed to contract methods.

    One context per frame; internal calls and nested deploys open child
    frames that share the meter and event buffer of the transaction.
    """

    def __init__(
        self,
        ledger: "Ledger",
        instance: ContractInstance,
        sender: Address,
        caller: Address,
        meter: GasMeter,
        events: list[tuple[Address, str, bytes]],
        deploys: list[tuple[str, int]],
    ):
        self.ledger = ledger
        self.instance = instance
        self.sender = sender  # original transaction sender
        self.caller = caller  # immediate caller (account or contract)
        self.meter = meter
        self._events = events
        self._deploys = deploys
        self.storage = MeteredStorage(instance.storage, meter, ledger.schedule)

    @property
    def self_address(self) -> Address:
        return self.instance.address

    def require(self, condition: bool, reason: str) -> None:
        if not condition:
            raise ContractRevert(reason)

    def revert(self, reason: str) -> None:
        raise ContractRevert(reason)

    def emit(self, name: str, payload: bytes) -> None:
        schedule = self.ledger.schedule
        self.meter.charge("event", schedule.event_base + schedule.event_per_byte * len(payload))
        self._events.append((self.instance.address, name, payload))

    def hash(self, data: bytes) -> bytes:
        words = (len(data) + 31) // 32
        self.meter.charge("hash", self.ledger.schedule.hash_per_word * max(words, 1))
        return hashlib.sha256(data).digest()

    def charge_proof_verify(self) -> None:
        self.meter.charge("proof_verify", self.ledger.schedule.proof_verify)

    def call(self, target: Address, call_name: str, *args):
        """Internal synchronous call; return value flows back to the caller."""
        instance = self.ledger._instance(target)
        if instance is None:
            raise ContractRevert("UnknownTarget")
        return self.ledger._invoke(
            instance, call_name, args, sender=self.sender, caller=self.instance.address,
            meter=self.meter, events=self._events, deploys=self._deploys, payload=None,
        )

    def deploy(self, template_id: str, init_args: tuple) -> Address:
        """Nested deploy; the deploying contract's nonce enters the address."""
        if template_id not in self.ledger.templates:
            raise ContractRevert("UnknownTemplate")
        before = self.meter.used
        address = self.ledger._deploy_instance(
            template_id, init_args, deployer=self.instance.address,
            sender=self.sender, meter=self.meter, events=self._events,
            deploys=self._deploys,
        )
        self._deploys.append((template_id, self.meter.used - before))
        return address


class Subscription:
    """Cursor over the global event log; poll() never skips or reorders."""

    def __init__(self, ledger: "Ledger", emitter: Address | None, name: str | None, from_seq: int):
        self.ledger = ledger
        self.emitter = emitter
        self.name = name
        self.cursor = from_seq

    def _matches(self, event: Event) -> bool:
        if self.emitter is not None and event.emitter != self.emitter:
            return False
        if self.name is not None and event.name != self.name:
            return False
        return True

    def poll(self) -> list[Event]:
        with self.ledger._lock:
            new = self.ledger.events[self.cursor :]
            self.cursor = len(self.ledger.events)
        return [e for e in new if self._matches(e)]

    def wait(self, timeout: float | None = None) -> list[Event]:
        """Block until at least one matching event arrives (or timeout)."""
        with self.ledger._cond:
            while True:
                new = self.ledger.events[self.cursor :]
                self.cursor = len(self.ledger.events)
                matched = [e for e in new if self._matches(e)]
                if matched:
                    return matched
                if not self.ledger._cond.wait(timeout):
                    return []


class Ledger:
    def __init__(self, schedule: GasSchedule | None = None, merkle_depth: int = 16):
        self.schedule = schedule or GasSchedule()
        self.merkle_depth = merkle_depth
        self.schedule.validate(merkle_depth)
        self.templates: dict[str, type] = {}
        self.accounts: dict[Address, int] = {}  # address -> next nonce
        self.contracts: dict[Address, ContractInstance] = {}
        self.events: list[Event] = []
        self.receipts: list[Receipt] = []
        self.tx_log: list[tuple[Transaction, Receipt]] = []
        self.height = 0
        self._lock = threading.RLock()
        self._cond = threading.Condition(self._lock)

    # ------------------------------------------------------------- accounts

    def next_nonce(self, address: Address) -> int:
        with self._lock:
            return self.accounts.get(address, 0)

    def register_template(self, template: type) -> None:
        self.templates[template.TEMPLATE_ID] = template

    def _instance(self, address: Address) -> ContractInstance | None:
        return self.contracts.get(address)

    # ------------------------------------------------------------ execution

    def submit(self, sender: Address, target: Address, call_name: str, payload: bytes) -> Receipt:
        """Build and execute a transaction with the sender's next nonce."""
        tx = Transaction(sender, target, call_name, payload, self.next_nonce(sender))
        return self.submit_tx(tx)

    def submit_tx(self, tx: Transaction) -> Receipt:
        with self._lock:
            receipt = self._execute(tx)
            self._cond.notify_all()
            return receipt

    def deploy(self, sender: Address, template_id: str, init_args: bytes) -> tuple[Address, Receipt]:
        """Deployment transaction; returns the new contract address."""
        from ..encoding import enc_bytes

        if template_id not in self.templates:
            raise UnknownTemplate(template_id)
        payload = enc_bytes(template_id.encode("utf-8")) + enc_bytes(init_args)
        with self._lock:
            predicted = derive_contract_address(sender, self.next_nonce(sender))
            receipt = self.submit(sender, DEPLOY_TARGET, "deploy", payload)
            address = predicted if receipt.success else ZERO_ADDRESS
            return address, receipt

    def _execute(self, tx: Transaction) -> Receipt:
        if tx.sender == ZERO_ADDRESS:
            raise InvalidSender("zero address can never send")
        expected = self.accounts.get(tx.sender, 0)
        if tx.nonce != expected:
            raise BadNonce(f"expected nonce {expected}, got {tx.nonce}")
        is_deploy = tx.target == DEPLOY_TARGET
        template_id = ""
        if is_deploy:
            template_id = self._peek_deploy_template(tx.payload)
            if template_id not in self.templates:
                raise UnknownTemplate(template_id)
        else:
            instance = self._instance(tx.target)
            if instance is None:
                raise UnknownTarget(tx.target.hex())
            template_id = instance.template_id

        # Nonce is consumed even if the call reverts.
        self.accounts[tx.sender] = expected + 1

        meter = GasMeter()
        meter.charge("tx_base", self.schedule.tx_base)
        events_buffer: list[tuple[Address, str, bytes]] = []
        deploy_buffer: list[tuple[str, int]] = []
        storage_snapshot = {addr: copy.deepcopy(inst.storage) for addr, inst in self.contracts.items()}
        known_contracts = set(self.contracts)
        nonce_snapshot = dict(self.accounts)

        status, reason = "success", None
        try:
            if is_deploy:
                tid, init_bytes = self._decode_deploy_payload(tx.payload)
                template = self.templates[tid]
                init_args = self._decode_args(template.CONSTRUCTOR_SCHEMA, init_bytes)
                self._deploy_instance(
                    tid, init_args, deployer=tx.sender, sender=tx.sender,
                    meter=meter, events=events_buffer, deploys=deploy_buffer, nonce=tx.nonce,
                )
            else:
                self._invoke(
                    instance, tx.call_name, None, sender=tx.sender, caller=tx.sender,
                    meter=meter, events=events_buffer, deploys=deploy_buffer, payload=tx.payload,
                )
        except ContractRevert as exc:
            status, reason = "reverted", exc.reason
            for addr in list(self.contracts):
                if addr not in known_contracts:
                    del self.contracts[addr]
                else:
                    self.contracts[addr].storage = storage_snapshot[addr]
            self.accounts = nonce_snapshot
            self.accounts[tx.sender] = expected + 1
            events_buffer = []
            deploy_buffer = []

        self.height += 1
        committed = []
        for emitter, name, payload in events_buffer:
            event = Event(emitter, name, payload, seq=len(self.events))
            self.events.append(event)
            committed.append(event)

        receipt = Receipt(
            tx_hash=tx.tx_hash(),
            status=status,
            reason=reason,
            gas_used=meter.used,
            events=tuple(committed),
            block_height=self.height,
            template_id=template_id,
            call_name=tx.call_name,
            deploys=tuple(deploy_buffer),
            gas_trace=tuple(meter.trace),
        )
        self.receipts.append(receipt)
        self.tx_log.append((tx, receipt))
        return receipt

    def _peek_deploy_template(self, payload: bytes) -> str:
        try:
            tid, _ = self._decode_deploy_payload(payload)
            return tid
        except EncodingError:
            return ""

    @staticmethod
    def _decode_deploy_payload(payload: bytes) -> tuple[str, bytes]:
        from ..encoding import Reader

        r = Reader(payload)
        template_id = r.bytes_().decode("utf-8")
        init_bytes = r.bytes_()
        r.done()
        return template_id, init_bytes

    @staticmethod
    def _decode_args(schema: tuple[str, ...], payload: bytes) -> tuple:
        try:
            return decode_fields(schema, payload)
        except EncodingError:
            raise ContractRevert("MalformedCall")

    def _deploy_instance(
        self,
        template_id: str,
        init_args: tuple,
        deployer: Address,
        sender: Address,
        meter: GasMeter,
        events: list,
        deploys: list,
        nonce: int | None = None,
    ) -> Address:
        """Instantiate a template. `nonce` is the already-consumed tx nonce for
        top-level deploys; nested deploys draw and bump the deployer's own."""
        template = self.templates[template_id]
        if nonce is None:
            nonce = self.accounts.get(deployer, 0)
            self.accounts[deployer] = nonce + 1
        address = derive_contract_address(deployer, nonce)
        instance = ContractInstance(template_id, address, {}, None)
        contract = template()
        instance.contract = contract
        self.contracts[address] = instance

        meter.charge("deploy_base", self.schedule.deploy_base)
        ctx = CallContext(
            self, instance, sender=sender, caller=deployer,
            meter=meter, events=events, deploys=deploys,
        )
        meter.suppress_storage = True
        try:
            contract.constructor(ctx, *init_args)
        finally:
            meter.suppress_storage = False
        meter.charge("deploy_state_slots", self.schedule.deploy_per_state_slot * len(instance.storage))
        return address

    def _invoke(
        self,
        instance: ContractInstance,
        call_name: str,
        args: tuple | None,
        sender: Address,
        caller: Address,
        meter: GasMeter,
        events: list,
        deploys: list,
        payload: bytes | None,
    ):
        calls = instance.contract.CALLS
        if call_name not in calls:
            raise ContractRevert("MalformedCall")
        schema, method_name = calls[call_name]
        if args is None:
            args = self._decode_args(schema, payload if payload is not None else b"")
        ctx = CallContext(
            self, instance, sender=sender, caller=caller,
            meter=meter, events=events, deploys=deploys,
        )
        method = getattr(instance.contract, method_name)
        return method(ctx, *args)

    # -------------------------------------------------------------- queries

    def subscribe(
        self,
        emitter: Address | None = None,
        name: str | None = None,
        from_seq: int = 0,
    ) -> Subscription:
        with self._lock:
            if from_seq > len(self.events):
                raise ValueError(f"from_seq {from_seq} beyond log end {len(self.events)}")
        return Subscription(self, emitter, name, from_seq)

    def read_storage(self, address: Address, key, default=None):
        """Snapshot-consistent unmetered read for off-chain components."""
        with self._lock:
            instance = self._instance(address)
            if instance is None:
                raise UnknownTarget(address.hex())
            return copy.deepcopy(instance.storage.get(key, default))

    def storage_snapshot(self, address: Address) -> dict:
        with self._lock:
            instance = self._instance(address)
            if instance is None:
                raise UnknownTarget(address.hex())
            return copy.deepcopy(instance.storage)

    def template_of(self, address: Address) -> str | None:
        with self._lock:
            instance = self._instance(address)
            return instance.template_id if instance else None

    def gas_report(self) -> dict[tuple[str, str], dict[str, float]]:
        """Aggregate all receipts since genesis by (template, call).

        Deploys appear under call_name="deploy"; templates instantiated
        inside another call (factory deploys) are attributed their metered
        share so every template shows its deployment cost.
        """
        with self._lock:
            rows: dict[tuple[str, str], dict[str, float]] = {}

            def add(template: str, call: str, gas: int) -> None:
                row = rows.setdefault((template, call), {"count": 0, "total_gas": 0})
                row["count"] += 1
                row["total_gas"] += gas

            for receipt in self.receipts:
                add(receipt.template_id, receipt.call_name, receipt.gas_used)
                for template, gas in receipt.deploys:
                    add(template, "deploy", gas)
            for row in rows.values():
                row["mean_gas"] = row["total_gas"] / row["count"]
            return rows

    def state_digest(self) -> bytes:
        """Hash of all contract storage, account nonces, and the event count."""
        with self._lock:
            parts = []
            for addr in sorted(self.contracts):
                inst = self.contracts[addr]
                parts.append(addr.hex())
                parts.append(inst.template_id)
                parts.append(_canonical(inst.storage))
            for addr in sorted(self.accounts):
                parts.append(addr.hex() + ":" + str(self.accounts[addr]))
            parts.append(str(len(self.events)))
            return hashlib.sha256("\n".join(parts).encode("utf-8")).digest()

    # ------------------------------------------------------------ dump/replay

    def dump_lines(self) -> Iterable[str]:
        """Ledger dump: genesis, every transaction with its receipt, final digest."""
        with self._lock:
            yield json.dumps(
                {
                    "kind": "genesis",
                    "gas_schedule": self.schedule.as_dict(),
                    "merkle_depth": self.merkle_depth,
                },
                sort_keys=True,
            )
            for tx, receipt in self.tx_log:
                yield json.dumps(
                    {
                        "kind": "tx",
                        "sender": tx.sender.hex(),
                        "target": tx.target.hex(),
                        "call": tx.call_name,
                        "payload": tx.payload.hex(),
                        "nonce": tx.nonce,
                        "receipt": {
                            "status": receipt.status,
                            "reason": receipt.reason,
                            "gas_used": receipt.gas_used,
                            "block": receipt.block_height,
                            "template": receipt.template_id,
                            "deploys": [[t, g] for t, g in receipt.deploys],
                            "events": [
                                [e.emitter.hex(), e.name, e.payload.hex(), e.seq]
                                for e in receipt.events
                            ],
                        },
                    },
                    sort_keys=True,
                )
            yield json.dumps(
                {
                    "kind": "final",
                    "state_digest": self.state_digest().hex(),
                    "event_count": len(self.events),
                },
                sort_keys=True,
            )

    def event_log_lines(self) -> Iterable[str]:
        with self._lock:
            for e in self.events:
                yield f"{e.seq}\t{e.emitter.hex()}\t{e.name}\t{e.payload.hex()}"


def _canonical(obj) -> str:
    """Deterministic text form for state digests."""
    if isinstance(obj, dict):
        items = sorted(obj.items(), key=lambda kv: repr(kv[0]))
        return "{" + ",".join(f"{_canonical(k)}:{_canonical(v)}" for k, v in items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_canonical(v) for v in obj) + "]"
    if isinstance(obj, bytes):
        return "0x" + obj.hex()
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, str)) or obj is None:
        return repr(obj)
    raise TypeError(f"non-canonical storage value of type {type(obj)!r}")
