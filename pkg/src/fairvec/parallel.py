"""Worker-count control for the library's own fan-out points.

The FAIRVEC_THREADS environment variable sets how many threads the
library may use for independent work items (classifier runs, sweep
points). Unset or 1 means fully serial. Results are ordered by input
position and every work item is seeded independently, so the outputs
are identical at any thread count.
"""
from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

logger = logging.getLogger(__name__)

ENV_VAR = "FAIRVEC_THREADS"

T = TypeVar("T")
R = TypeVar("R")


def thread_count() -> int:
    """The configured worker cap; 1 when unset or unparseable."""
    raw = os.environ.get(ENV_VAR)
    if raw is None or not raw.strip():
        return 1
    try:
        n = int(raw)
    except ValueError:
        logger.warning("ignoring non-integer %s=%r", ENV_VAR, raw)
        return 1
    return max(1, n)


def parallel_map(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """Map ``fn`` over ``items``, fanning out to FAIRVEC_THREADS workers.

    Serial when the cap is 1 or there is at most one item; output order
    always matches input order.
    """
    work = list(items)
    n = min(thread_count(), len(work))
    if n <= 1:
        return [fn(item) for item in work]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, work))
