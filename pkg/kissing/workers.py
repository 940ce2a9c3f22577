"""Order-preserving fan-out for independent claim checks and sampling trials."""

from __future__ import annotations

import logging
from collections.abc import Callable, Iterable
from multiprocessing import Pool
from typing import TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(fn: Callable[[T], R], items: Iterable[T], workers: int = 1) -> list[R]:
    """``[fn(x) for x in items]``, optionally across a process pool.

    Results come back in input order whatever the worker count, so reports
    assembled from them do not depend on scheduling. ``fn`` must be a
    module-level callable when ``workers > 1``.
    """
    jobs = list(items)
    if workers <= 1 or len(jobs) <= 1:
        return [fn(x) for x in jobs]
    processes = min(workers, len(jobs))
    logger.debug("dispatching %d jobs to %d processes", len(jobs), processes)
    with Pool(processes) as pool:
        return pool.map(fn, jobs, chunksize=1)
