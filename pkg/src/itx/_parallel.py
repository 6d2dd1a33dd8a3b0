"""Ordered parallel map capped by the ITX_THREADS environment variable."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

from .errors import PreconditionError


def thread_count() -> int:
    """Worker count from ITX_THREADS: unset or 0 means one per CPU."""
    raw = os.environ.get("ITX_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise PreconditionError(f"ITX_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise PreconditionError("ITX_THREADS must be >= 0")
    return n if n > 0 else (os.cpu_count() or 1)


def pmap(fn, items):
    """[fn(i) for i in items], evaluated concurrently; results keep input order."""
    items = list(items)
    n = min(thread_count(), len(items))
    if n <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))
