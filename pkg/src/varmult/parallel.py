"""Ordered thread-pool map capped by VARMULT_THREADS."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def thread_count() -> int:
    """Worker cap from VARMULT_THREADS (default 1, invalid values fall back to 1)."""
    try:
        return max(1, int(os.environ.get("VARMULT_THREADS", "1")))
    except ValueError:
        return 1


def map_ordered(fn, items) -> list:
    """``[fn(x) for x in items]``, possibly in parallel; results keep input order."""
    items = list(items)
    threads = min(thread_count(), len(items))
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
