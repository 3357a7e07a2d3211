"""
Parallel Module.

This module provides an ordered, bounded worker-pool map. Results come back in
input order whatever the completion order, so every reduction over them is
deterministic.

Functions:
    - resolve_workers: Effective pool size.
    - parallel_map: Ordered map over a thread pool.

Usage:
    from conedual.utils.parallel import parallel_map
    squares = parallel_map(lambda k: k * k, range(8), workers=4)
"""

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def resolve_workers(workers: Optional[int] = None) -> int:
    """Returns workers, or the number of available cores when it is None."""
    if workers is None:
        return os.cpu_count() or 1
    return max(1, int(workers))


def parallel_map(fn: Callable[[T], R], items: Iterable[T], workers: Optional[int] = None) -> List[R]:
    """
    Applies fn to every item on at most `workers` threads.

    Args:
        fn (Callable): The function; numpy releases the GIL inside its kernels.
        items (Iterable): The inputs.
        workers (int, optional): Pool size. Defaults to the number of cores.

    Returns:
        List: fn(item) in input order. The first exception raised by fn propagates.
    """
    work = list(items)
    size = min(resolve_workers(workers), len(work))
    if size <= 1:
        return [fn(item) for item in work]
    with ThreadPoolExecutor(max_workers=size) as pool:
        return list(pool.map(fn, work))
