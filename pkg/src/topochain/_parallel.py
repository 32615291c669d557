from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def max_workers() -> int:
    """Thread cap from ``TOPOCHAIN_THREADS`` (default 1: serial)."""
    raw = os.environ.get("TOPOCHAIN_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def parallel_map(func, items) -> list:
    """Order-preserving map; threads only help because LAPACK releases the GIL."""
    items = list(items)
    workers = min(max_workers(), len(items))
    if workers <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))
