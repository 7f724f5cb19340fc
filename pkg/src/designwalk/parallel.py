"""Order-preserving chunked execution over a process pool."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor

THREADS_ENV = "DESIGNWALK_THREADS"


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def chunked_map(func, count: int, threads: int | None = None, chunk: int = 256, args=()):
    """Call ``func(start, stop, *args)`` over ``[0, count)`` in chunks.

    Results come back in index order regardless of ``threads``, so callers that
    reduce them with a fixed-order sum get identical numbers for any worker count.
    """
    threads = default_threads() if threads is None else max(1, int(threads))
    bounds = [(s, min(s + chunk, count)) for s in range(0, count, chunk)]
    if threads == 1 or len(bounds) <= 1:
        return [func(a, b, *args) for a, b in bounds]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(func, a, b, *args) for a, b in bounds]
        return [f.result() for f in futures]
