#  Copyright (c) 2025.  ftfgates
#     _____  __    _____
#    / __/ |/ /__ / __/__ ____ _/ /____ ___
#   / _//    / -_) _// _ `/ _ `/ __/ -_|_-<
#  /_/ /_/|_/\__/_/  \_, /\_,_/\__/\__/___/
#                   /___/
#  MIT License
#

import logging
from typing import Callable, Iterable, List, TypeVar

import joblib

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(func: Callable[[T], R], items: Iterable[T], jobs: int = 1, prefer: str | None = None) -> List[R]:
    """
    Evaluate `func` on every item, in parallel when `jobs` > 1.

    Results come back in input order whatever the completion order, so reductions over
    them are deterministic.

    :param func: module level (picklable) worker.
    :param items: inputs, one task each.
    :param jobs: joblib ``n_jobs``; 1 runs in process.
    :param prefer: joblib backend hint (``"threads"`` or ``"processes"``).
    """
    items = list(items)
    if jobs == 1 or len(items) <= 1:
        return [func(item) for item in items]
    logger.debug("dispatching %d tasks on %d workers", len(items), jobs)
    return joblib.Parallel(n_jobs=jobs, prefer=prefer)(joblib.delayed(func)(item) for item in items)


