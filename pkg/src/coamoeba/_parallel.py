from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def thread_count(workers: int | None = None) -> int:
    """Worker count: explicit argument, else ``COAMOEBA_THREADS``, else 1."""
    if workers is None:
        env = os.environ.get("COAMOEBA_THREADS", "").strip()
        workers = int(env) if env else 1
    return max(1, int(workers))


def ordered_map(fn: Callable[[T], R], chunks: Sequence[T], workers: int | None = None) -> list[R]:
    # results come back in input order regardless of scheduling
    n = thread_count(workers)
    if n == 1 or len(chunks) <= 1:
        return [fn(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, chunks))
