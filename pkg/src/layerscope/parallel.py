"""Thread-pool plumbing with an environment-variable cap.

LAYERSCOPE_THREADS limits worker count for sweeps and profile builds.
Results are always combined in submission order, so the artifact bytes
do not depend on scheduling.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

from .exceptions import ValidationError

ENV_VAR = "LAYERSCOPE_THREADS"


def thread_limit() -> int:
    raw = os.environ.get(ENV_VAR)
    if raw is None or raw.strip() == "":
        return max(1, os.cpu_count() or 1)
    try:
        n = int(raw)
    except ValueError:
        raise ValidationError(f"{ENV_VAR} must be an integer, got {raw!r}")
    if n < 1:
        raise ValidationError(f"{ENV_VAR} must be >= 1, got {n}")
    return n


def ordered_map(fn, items, threads: int | None = None) -> list:
    """Map ``fn`` over ``items`` in a pool; output order follows input order."""
    items = list(items)
    if threads is None:
        threads = thread_limit()
    if threads == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
