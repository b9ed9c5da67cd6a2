"""Deterministic replica plumbing: splittable per-replica streams and a
thread pool whose worker count never changes results.

Every replica owns the stream PCG64(SeedSequence(master_seed, spawn_key=
key + (replica,))), so any partition of the replica range over any number of
workers produces the same values in the same canonical (replica-indexed)
order.  The compiled kernels release the GIL, so threads give real
parallelism on the heavy estimators.  COVERTREE_THREADS caps the worker
count; unset means one worker per CPU.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np


def replica_seed_seq(master_seed: int, *key: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(entropy=master_seed, spawn_key=tuple(key))


def replica_rng(master_seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(replica_seed_seq(master_seed, *key)))


def seed_fingerprint(master_seed: int, *key: int) -> int:
    """Stable 32-bit identifier of a replica's stream (for run records)."""
    return int(replica_seed_seq(master_seed, *key).generate_state(1, np.uint32)[0])


def resolve_workers(workers: int | None = None) -> int:
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get("COVERTREE_THREADS", "").strip()
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass(frozen=True)
class ReplicaSummary:
    """Monte Carlo estimate with standard error sample_std/sqrt(replicas)."""

    estimate: float
    stderr: float
    replicas: int
    master_seed: int


def _run_indexed(fn: Callable[[int], None], n: int, workers: int | None) -> None:
    """Apply fn to 0..n-1, split into contiguous chunks over a thread pool."""
    w = resolve_workers(workers)
    if w == 1 or n < 2:
        for i in range(n):
            fn(i)
        return
    chunks = min(4 * w, n)
    bounds = np.linspace(0, n, chunks + 1, dtype=int)

    def run_chunk(c):
        for i in range(bounds[c], bounds[c + 1]):
            fn(i)

    with ThreadPoolExecutor(max_workers=w) as pool:
        list(pool.map(run_chunk, range(chunks)))


def run_replicas(
    estimator: Callable[[np.random.Generator], float],
    replicas: int,
    master_seed: int,
    workers: int | None = None,
    key: Sequence[int] = (),
) -> ReplicaSummary:
    """Mean and stderr of a pure per-replica estimator over independent streams.

    estimator(rng) must depend only on its rng argument; it runs concurrently.
    Result bits are independent of the worker count.
    """
    if replicas < 1:
        raise ValueError(f"replicas must be >= 1, got {replicas}")
    key = tuple(key)
    values = np.empty(replicas)

    def one(i: int) -> None:
        values[i] = estimator(replica_rng(master_seed, *key, i))

    _run_indexed(one, replicas, workers)
    estimate = float(values.mean())
    stderr = float(values.std(ddof=1) / math.sqrt(replicas)) if replicas > 1 else 0.0
    return ReplicaSummary(estimate, stderr, replicas, master_seed)


def run_replica_records(
    record_fn: Callable[[int, np.random.Generator, int], dict],
    replicas: int,
    master_seed: int,
    workers: int | None = None,
    key: Sequence[int] = (),
) -> list[dict]:
    """Per-replica record dicts in replica order, worker-count independent.

    record_fn(replica_index, rng, stream_fingerprint) -> dict.  Zero replicas
    is allowed (an empty run still produces a valid, empty artifact).
    """
    if replicas < 0:
        raise ValueError(f"replicas must be >= 0, got {replicas}")
    key = tuple(key)
    records: list = [None] * replicas

    def one(i: int) -> None:
        records[i] = record_fn(i, replica_rng(master_seed, *key, i),
                               seed_fingerprint(master_seed, *key, i))

    _run_indexed(one, replicas, workers)
    return records


def summarize_values(values: np.ndarray, master_seed: int) -> ReplicaSummary:
    """ReplicaSummary of an already-collected replica value array."""
    values = np.asarray(values, dtype=float)
    n = values.size
    if n < 1:
        raise ValueError("cannot summarize zero replicas")
    stderr = float(values.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return ReplicaSummary(float(values.mean()), stderr, n, master_seed)
