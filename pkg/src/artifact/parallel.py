"""Process-pool map with ordered (deterministic) reduction."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")

_workers = 1


def set_workers(n: int) -> None:
    global _workers
    _workers = max(1, int(n))


def workers() -> int:
    return _workers


def pmap(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """Results in input order; sequential when one worker is configured."""
    items = list(items)
    if _workers == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=_workers) as ex:
        return list(ex.map(fn, items))
