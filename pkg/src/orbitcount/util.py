"""Small shared helpers: deterministic parallel map and child seeds."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def pmap(fn: Callable[[T], R], items: Sequence[T], threads: int = 1) -> List[R]:
    """Map preserving input order; results are identical for any thread
    count because items carry their own seeds and the reduce is ordered."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def child_seed(seed: int, index: int) -> int:
    """Deterministic per-task seed independent of scheduling."""
    return (seed * 1_000_003 + index * 7_919 + 12_345) % (2 ** 63)
