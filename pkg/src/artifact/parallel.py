"""Deterministic parallel map behind the `--jobs` flag."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable


def pmap(fn: Callable, items: Iterable, jobs: int = 1) -> list:
    """map(fn, items) with results in input order; processes when jobs > 1."""
    items = list(items)
    if jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))
