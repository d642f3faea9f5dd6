"""Worker-count plumbing for candidate scoring.

GRIDCTRL_THREADS caps the worker pool: unset or 1 means sequential, 0 means
one worker per CPU.  Results always come back in input order, so threading
never changes any output.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Iterator, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def worker_count() -> int:
    raw = os.environ.get("GRIDCTRL_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"GRIDCTRL_THREADS must be an integer, got '{raw}'") from None
    if n < 0:
        raise ValueError(f"GRIDCTRL_THREADS must be >= 0, got {n}")
    if n == 0:
        return os.cpu_count() or 1
    return n


def ordered_map(fn: Callable[[T], R], items: Sequence[T] | Iterable[T]) -> Iterator[R]:
    items = list(items)
    workers = worker_count()
    if workers <= 1 or len(items) <= 1:
        return iter([fn(item) for item in items])
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return iter(list(pool.map(fn, items)))
