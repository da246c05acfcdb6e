"""Flat key-value config files.

Format: one `key = value` per line, `#` starts a comment, blank lines
ignored. Keys are dotted paths (`gas.tx_base`, `job.batch_size`); values
stay strings here and are coerced where they are consumed.
"""

from __future__ import annotations

from pathlib import Path

from .state import GasSchedule, DEFAULT_SCHEDULE


def parse_kv_text(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def load_kv_file(path: str | Path) -> dict[str, str]:
    return parse_kv_text(Path(path).read_text(encoding="utf-8"))


def schedule_from_config(config: dict[str, str], merkle_depth: int = 16) -> GasSchedule:
    """Gas schedule from `gas.*` keys; unspecified entries keep defaults."""
    values = {}
    for name in DEFAULT_SCHEDULE:
        key = f"gas.{name}"
        if key in config:
            values[name] = int(config[key])
    schedule = GasSchedule(**values)
    schedule.validate(merkle_depth)
    return schedule
