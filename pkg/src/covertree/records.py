"""Replica record serialization: JSONL streams, meta sidecars, CSV tables.

JSONL is the replica-stream format (appendable, one record per line, keys in
a fixed order, records canonically sorted by (depth, t, replica) so parallel
production order never leaks into artifacts).  CSV is the summary/fit format
(full 17-significant-digit precision, plain decimal points).  Every JSONL
output gets a ``<name>.meta.json`` sidecar holding the resolved
configuration, master seed, and artifact version.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

from .replicas import ReplicaSummary, summarize_values

import numpy as np


def _clean(value):
    if isinstance(value, (np.floating, np.integer)):
        value = value.item()
    if isinstance(value, float) and math.isnan(value):
        return None
    if isinstance(value, np.ndarray):
        return [_clean(v) for v in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    return value


def canonical_sort(records: list[dict]) -> list[dict]:
    return sorted(
        records,
        key=lambda r: (r.get("depth", 0), r.get("t") or 0.0, r.get("replica", 0)),
    )


def emit_records(
    path: str | Path,
    records: Iterable[dict],
    key_order: Sequence[str],
    meta: dict,
) -> None:
    """Write sorted JSONL plus the meta sidecar; keys follow key_order exactly."""
    path = Path(path)
    rows = canonical_sort(list(records))
    try:
        with path.open("w") as fh:
            for rec in rows:
                unknown = set(rec) - set(key_order)
                if unknown:
                    raise ValueError(f"record keys {sorted(unknown)} not in schema {list(key_order)}")
                ordered = {k: _clean(rec[k]) for k in key_order if k in rec}
                fh.write(json.dumps(ordered, allow_nan=False) + "\n")
        meta_path = path.with_name(path.name + ".meta.json")
        with meta_path.open("w") as fh:
            json.dump(_clean(meta), fh, indent=2, sort_keys=True, allow_nan=False)
            fh.write("\n")
    except OSError as exc:
        raise OSError(f"cannot write records to {path}: {exc}") from exc


def read_records(path: str | Path) -> list[dict]:
    path = Path(path)
    try:
        with path.open() as fh:
            return [json.loads(line) for line in fh if line.strip()]
    except OSError as exc:
        raise OSError(f"cannot read records from {path}: {exc}") from exc


def read_meta(path: str | Path) -> dict | None:
    meta_path = Path(path)
    if not meta_path.name.endswith(".meta.json"):
        meta_path = meta_path.with_name(meta_path.name + ".meta.json")
    if not meta_path.exists():
        return None
    with meta_path.open() as fh:
        return json.load(fh)


def summarize_records(records: list[dict], value_field: str, master_seed: int) -> ReplicaSummary:
    """Recompute the ReplicaSummary of a record stream over one field.

    Booleans count as 0/1; a null value in the chosen field is an error
    (pick a field that every record carries).
    """
    values = []
    for rec in records:
        v = rec.get(value_field)
        if v is None:
            raise ValueError(f"record {rec.get('replica')} has no value for {value_field!r}")
        values.append(float(v))
    return summarize_values(np.array(values), master_seed)


def format_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for row in rows:
                writer.writerow([format_cell(v) for v in row])
    except OSError as exc:
        raise OSError(f"cannot write table to {path}: {exc}") from exc


def read_csv(path: str | Path) -> list[dict]:
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            return list(csv.DictReader(fh))
    except OSError as exc:
        raise OSError(f"cannot read table from {path}: {exc}") from exc
