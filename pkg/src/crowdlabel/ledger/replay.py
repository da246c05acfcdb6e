"""Re-execute a ledger dump from genesis and verify it reproduces itself.

The dump carries the genesis config and every transaction with its recorded
receipt; determinism means re-running the transactions must regenerate
identical receipts, events, and final state digest.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .chain import Ledger
from .state import GasSchedule, Transaction


@dataclass
class ReplayResult:
    ok: bool
    transactions: int
    mismatches: list[str]
    state_digest: str
    event_count: int


def replay_dump(lines: list[str], templates) -> ReplayResult:
    records = [json.loads(line) for line in lines if line.strip()]
    if not records or records[0].get("kind") != "genesis":
        raise ValueError("dump must start with a genesis record")
    genesis = records[0]
    ledger = Ledger(GasSchedule(**genesis["gas_schedule"]), genesis["merkle_depth"])
    for template in templates:
        ledger.register_template(template)

    mismatches: list[str] = []
    count = 0
    for record in records[1:]:
        if record["kind"] == "tx":
            count += 1
            tx = Transaction(
                sender=bytes.fromhex(record["sender"]),
                target=bytes.fromhex(record["target"]),
                call_name=record["call"],
                payload=bytes.fromhex(record["payload"]),
                nonce=record["nonce"],
            )
            receipt = ledger.submit_tx(tx)
            recorded = record["receipt"]
            got = {
                "status": receipt.status,
                "reason": receipt.reason,
                "gas_used": receipt.gas_used,
                "block": receipt.block_height,
                "template": receipt.template_id,
                "deploys": [[t, g] for t, g in receipt.deploys],
                "events": [
                    [e.emitter.hex(), e.name, e.payload.hex(), e.seq] for e in receipt.events
                ],
            }
            for key, value in got.items():
                if recorded.get(key) != value:
                    mismatches.append(f"tx {count} {key}: recorded {recorded.get(key)!r} != replayed {value!r}")
        elif record["kind"] == "final":
            digest = ledger.state_digest().hex()
            if record["state_digest"] != digest:
                mismatches.append(f"final state digest: recorded {record['state_digest']} != {digest}")
            if record["event_count"] != len(ledger.events):
                mismatches.append(
                    f"event count: recorded {record['event_count']} != {len(ledger.events)}"
                )
    return ReplayResult(
        ok=not mismatches,
        transactions=count,
        mismatches=mismatches,
        state_digest=ledger.state_digest().hex(),
        event_count=len(ledger.events),
    )
