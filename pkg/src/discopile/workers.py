import os
from concurrent.futures import ThreadPoolExecutor


def max_workers() -> int:
    env = os.environ.get("DISCOPILE_THREADS", "").strip()
    if env:
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


def ordered_map(fn, items):
    """``list(map(fn, items))``, possibly threaded; result order is the input order."""
    items = list(items)
    n = min(max_workers(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
