"""Deterministic fan-out over independent work items."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

ENV_THREADS = "BOWTIE_MBQC_THREADS"


def worker_count() -> int:
    """Worker cap from ``BOWTIE_MBQC_THREADS`` (default 1, i.e. serial)."""
    try:
        return max(1, int(os.environ.get(ENV_THREADS, "1")))
    except ValueError:
        return 1


def parallel_map(fn, items) -> list:
    """``[fn(x) for x in items]``, results always in input order."""
    items = list(items)
    n = min(worker_count(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
