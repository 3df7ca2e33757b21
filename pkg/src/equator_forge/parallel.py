"""Worker-count control for embarrassingly parallel sweeps.

The worker count comes from the ``EQUATOR_FORGE_THREADS`` environment variable
(default: all cores).  Sweeps must reduce their results in input order so that
the output is identical for any worker count; :func:`tmap` guarantees exactly
that.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

__all__ = ["thread_count", "tmap"]


def thread_count() -> int:
    raw = os.environ.get("EQUATOR_FORGE_THREADS", "")
    try:
        count = int(raw)
    except ValueError:
        count = 0
    if count < 1:
        count = os.cpu_count() or 1
    return count


def tmap(fn, items) -> list:
    """Map ``fn`` over ``items``, preserving order, on the configured workers."""
    items = list(items)
    workers = thread_count()
    if workers == 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
