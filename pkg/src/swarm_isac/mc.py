"""Chunked Monte-Carlo execution.

Trials are grouped into fixed, index-aligned chunks. Every trial draws from
its own seed-derived stream, and chunk boundaries never depend on the worker
count, so any degree of parallelism reproduces the sequential result bit for
bit.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, TypeVar

T = TypeVar("T")

CHUNK = 500


def default_workers() -> int:
    return os.cpu_count() or 1


def chunk_bounds(trials: int, chunk: int = CHUNK) -> list[tuple[int, int]]:
    return [(i, min(i + chunk, trials)) for i in range(0, trials, chunk)]


def run_chunks(fn: Callable[[int, int], T], trials: int, workers: int = 1,
               chunk: int = CHUNK) -> list[T]:
    """Evaluate ``fn(start, stop)`` over every chunk, results in trial order."""
    bounds = chunk_bounds(trials, chunk)
    if workers <= 1 or len(bounds) <= 1:
        return [fn(a, b) for a, b in bounds]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda ab: fn(*ab), bounds))
