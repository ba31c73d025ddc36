"""Thread pool used by the multi-start and Monte-Carlo loops."""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


class WorkerPool:
    """
    Order-preserving map over a fixed number of threads.

    With one thread the map runs inline, so results never depend on the
    thread count.
    """

    def __init__(self, threads: int = 1):
        if threads < 1:
            raise ValueError(f"Thread count must be positive, got {threads}")
        self.threads = threads

    def map(self, fn: Callable[[T], R], items: Iterable[T]) -> List[R]:
        items = list(items)
        if self.threads == 1 or len(items) < 2:
            return [fn(item) for item in items]
        logger.debug(f"Mapping {len(items)} tasks over {self.threads} threads")
        with ThreadPoolExecutor(max_workers=self.threads) as executor:
            return list(executor.map(fn, items))
