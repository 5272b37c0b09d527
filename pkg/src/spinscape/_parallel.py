"""Deterministic chunked execution.

Work is split into a fixed number of chunks, each with its own seed derived
from ``(seed, chunk_index)``.  Results are returned in chunk order, so the
output does not depend on how many threads ran them.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

import numpy as np

T = TypeVar("T")

THREADS_ENV = "SPINSCAPE_THREADS"


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV, "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n <= 0:
        n = os.cpu_count() or 1
    return n


def chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(chunk)]))


def chunk_sizes(total: int, chunk: int) -> list[int]:
    full, rest = divmod(int(total), int(chunk))
    return [chunk] * full + ([rest] if rest else [])


def run_chunks(fn: Callable[[int, int], T], sizes: Sequence[int]) -> list[T]:
    """Call ``fn(chunk_index, size)`` for every chunk; results in chunk order."""
    workers = min(worker_count(), max(len(sizes), 1))
    if workers <= 1:
        return [fn(i, s) for i, s in enumerate(sizes)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda args: fn(*args), enumerate(sizes)))
