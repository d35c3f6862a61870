"""Order-preserving map over independent jobs.

Width comes from ``NLSWAVE_THREADS``; unset means ``os.cpu_count()``. Results
are returned in input order, so output does not depend on the width.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

ENV_VAR = "NLSWAVE_THREADS"

T = TypeVar("T")
R = TypeVar("R")


def width() -> int:
    raw = os.environ.get(ENV_VAR, "").strip()
    if not raw:
        return os.cpu_count() or 1
    n = int(raw)
    if n < 1:
        raise ValueError(f"{ENV_VAR} must be a positive integer, got {raw!r}")
    return n


def pmap(func: Callable[[T], R], items: Iterable[T]) -> list[R]:
    items = list(items)
    w = min(width(), len(items))
    if w <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=w) as ex:
        return list(ex.map(func, items))
