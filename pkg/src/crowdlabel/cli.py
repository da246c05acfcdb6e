"""Command-line entry point.

    crowdlabel run <config> [--out DIR]
    crowdlabel gas-report <ledger-dump> [--csv OUT] [--assert-zk-dominance]
    crowdlabel compare <config> --seeds N [--out FILE]
    crowdlabel replay <run-dir-or-dump>
    crowdlabel serve <config> [--port P] [--host H]

`run` writes the campaign artifacts (metrics.csv, gas.csv, events.log,
summary.txt) plus the ledger dump (ledger.jsonl) that gas-report and
replay consume. All commands are deterministic given their inputs;
`serve` is interactive.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .contracts import ALL_TEMPLATES
from .ledger.replay import replay_dump
from .simulation import CampaignConfig, compare_strategies, run_campaign

ARTIFACTS = ("metrics.csv", "gas.csv", "events.log", "summary.txt")
DUMP_NAME = "ledger.jsonl"

# (zk template, zk call) -> (plain template, plain call); deploys checked per pair too
ZK_CALL_COUNTERPARTS = {
    ("ZKJobInstance", "submit_label_zk"): ("JobInstance", "submit_label"),
    ("ZKJobScore", "claim_score"): ("JobScore", "claim_score"),
}
ZK_TEMPLATE_PAIRS = (("ZKJobInstance", "JobInstance"), ("ZKJobScore", "JobScore"))


@click.group()
def main() -> None:
    """Deterministic crowd-labeling campaigns on a simulated ledger."""


def _load_config(path: str) -> CampaignConfig:
    config_path = Path(path)
    if not config_path.exists():
        raise click.ClickException(f"config file not found: {config_path}")
    try:
        return CampaignConfig.from_file(config_path)
    except Exception as exc:
        raise click.ClickException(f"bad config {config_path}: {exc}")


@main.command("run")
@click.argument("config_path", metavar="CONFIG")
@click.option("--out", "out_dir", default="campaign-out", show_default=True, help="artifact directory")
def cmd_run(config_path: str, out_dir: str) -> None:
    """Run a campaign and write its artifacts."""
    config = _load_config(config_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    try:
        metrics, system = run_campaign(config, store_dir=out / "store")
    except Exception as exc:
        raise click.ClickException(f"campaign failed: {exc}")
    (out / "metrics.csv").write_text(metrics.metrics_csv(), encoding="utf-8")
    (out / "gas.csv").write_text(metrics.gas_csv(), encoding="utf-8")
    (out / "events.log").write_text(
        "\n".join(system.ledger.event_log_lines()) + "\n", encoding="utf-8"
    )
    (out / "summary.txt").write_text("\n".join(metrics.summary_lines()) + "\n", encoding="utf-8")
    (out / DUMP_NAME).write_text("\n".join(system.ledger.dump_lines()) + "\n", encoding="utf-8")
    click.echo(f"campaign complete: {len(metrics.jobs)} job(s), {metrics.event_count} events")
    for job in metrics.jobs:
        click.echo(
            f"  job {job.job_id} ({job.mode}): final held-out accuracy "
            f"{job.final_heldout_accuracy:.3f}, refund {job.refund}"
        )
    click.echo(f"artifacts in {out}/")


def _rows_from_dump(lines: list[str]) -> dict[tuple[str, str], dict[str, float]]:
    rows: dict[tuple[str, str], dict[str, float]] = {}

    def add(template: str, call: str, gas: int) -> None:
        row = rows.setdefault((template, call), {"count": 0, "total_gas": 0})
        row["count"] += 1
        row["total_gas"] += gas

    for line in lines:
        if not line.strip():
            continue
        record = json.loads(line)
        if record.get("kind") != "tx":
            continue
        receipt = record["receipt"]
        add(receipt["template"], record["call"], receipt["gas_used"])
        for template, gas in receipt.get("deploys", []):
            add(template, "deploy", gas)
    for row in rows.values():
        row["mean_gas"] = row["total_gas"] / row["count"]
    return rows


def _check_zk_dominance(rows: dict[tuple[str, str], dict[str, float]]) -> list[str]:
    failures = []

    def mean(template: str, call: str) -> float | None:
        row = rows.get((template, call))
        return row["mean_gas"] if row else None

    checks = [(zk_t, "deploy", plain_t, "deploy") for zk_t, plain_t in ZK_TEMPLATE_PAIRS]
    checks += [zk + plain for zk, plain in ZK_CALL_COUNTERPARTS.items()]
    for zk_template, zk_call, plain_template, plain_call in checks:
        zk_mean = mean(zk_template, zk_call)
        plain_mean = mean(plain_template, plain_call)
        if zk_mean is None or plain_mean is None:
            failures.append(f"missing rows for {zk_template}.{zk_call} vs {plain_template}.{plain_call}")
        elif zk_mean <= plain_mean:
            failures.append(
                f"{zk_template}.{zk_call} mean {zk_mean:.0f} <= {plain_template}.{plain_call} mean {plain_mean:.0f}"
            )
    return failures


@main.command("gas-report")
@click.argument("dump_path", metavar="LEDGER_DUMP")
@click.option("--csv", "csv_out", default=None, help="also write rows as CSV")
@click.option("--assert-zk-dominance", is_flag=True, help="exit 1 unless ZK calls out-cost plain ones")
def cmd_gas_report(dump_path: str, csv_out: str | None, assert_zk_dominance: bool) -> None:
    """Per-(template, call) gas table from a run's ledger dump."""
    path = Path(dump_path)
    if path.is_dir():
        path = path / DUMP_NAME
    if not path.exists():
        raise click.ClickException(f"dump not found: {path}")
    try:
        rows = _rows_from_dump(path.read_text(encoding="utf-8").splitlines())
    except (json.JSONDecodeError, KeyError) as exc:
        raise click.ClickException(f"unreadable dump {path}: {exc}")

    ordered = sorted(rows.items(), key=lambda kv: (-kv[1]["mean_gas"], kv[0]))
    click.echo(f"{'template':<18} {'call':<18} {'count':>6} {'total_gas':>12} {'mean_gas':>12}")
    for (template, call), row in ordered:
        click.echo(
            f"{template:<18} {call:<18} {row['count']:>6} {row['total_gas']:>12} {row['mean_gas']:>12.2f}"
        )
    if csv_out:
        lines = ["template,call,count,total_gas,mean_gas"]
        for (template, call) in sorted(rows):
            row = rows[(template, call)]
            lines.append(f"{template},{call},{row['count']},{row['total_gas']},{row['mean_gas']:.2f}")
        Path(csv_out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    if assert_zk_dominance:
        failures = _check_zk_dominance(rows)
        if failures:
            for failure in failures:
                click.echo(f"zk-dominance FAILED: {failure}", err=True)
            sys.exit(1)
        click.echo("zk-dominance holds: ZK deploys and verify-bearing calls out-cost plain counterparts")


@main.command("compare")
@click.argument("config_path", metavar="CONFIG")
@click.option("--seeds", default=10, show_default=True, help="number of paired seeds")
@click.option("--out", "out_file", default=None, help="write the summary CSV here")
def cmd_compare(config_path: str, seeds: int, out_file: str | None) -> None:
    """Entropy vs random selection, paired over seeds."""
    config = _load_config(config_path)
    result = compare_strategies(config, list(range(1, seeds + 1)))
    for line in result.lines():
        click.echo(line)
    if out_file:
        Path(out_file).write_text("\n".join(result.lines()) + "\n", encoding="utf-8")


@main.command("replay")
@click.argument("path", metavar="RUN_DIR_OR_DUMP")
def cmd_replay(path: str) -> None:
    """Re-execute a recorded run and verify receipts, events, and state."""
    target = Path(path)
    dump_path = target / DUMP_NAME if target.is_dir() else target
    if not dump_path.exists():
        raise click.ClickException(f"dump not found: {dump_path}")
    lines = dump_path.read_text(encoding="utf-8").splitlines()
    try:
        result = replay_dump(lines, ALL_TEMPLATES)
    except (json.JSONDecodeError, ValueError, KeyError) as exc:
        raise click.ClickException(f"unreadable dump {dump_path}: {exc}")
    if not result.ok:
        for mismatch in result.mismatches[:20]:
            click.echo(f"mismatch: {mismatch}", err=True)
        raise click.ClickException(f"replay diverged ({len(result.mismatches)} mismatches)")
    click.echo(
        f"replay ok: {result.transactions} transactions, {result.event_count} events, "
        f"state digest {result.state_digest[:16]}…"
    )
    events_path = dump_path.parent / "events.log"
    if events_path.exists():
        recorded = events_path.read_text(encoding="utf-8")
        rebuilt = _events_from_dump(lines)
        if recorded != rebuilt:
            raise click.ClickException("events.log does not match the replayed event stream")
        click.echo("events.log matches the replayed stream byte-for-byte")


def _events_from_dump(lines: list[str]) -> str:
    out = []
    for line in lines:
        if not line.strip():
            continue
        record = json.loads(line)
        if record.get("kind") != "tx":
            continue
        for emitter, name, payload, seq in record["receipt"]["events"]:
            out.append(f"{seq}\t{emitter}\t{name}\t{payload}")
    return "\n".join(out) + "\n"


@main.command("serve")
@click.argument("config_path", metavar="CONFIG")
@click.option("--port", default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
def cmd_serve(config_path: str, port: int, host: str) -> None:
    """Create the configured jobs and expose them over HTTP for live workers."""
    import uvicorn

    from .gateway.app import create_live_app

    config = _load_config(config_path)
    app = create_live_app(config)
    click.echo(f"serving on http://{host}:{port} (docs at /docs)")
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
