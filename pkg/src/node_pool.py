import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Callable, List, Optional, Sequence, TypeVar

from src.config import config

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


class NodePool:
    """Thread pool for independent per-node evaluations"""

    def __init__(self, max_workers: Optional[int] = None):
        self.max_workers = max(1, int(max_workers if max_workers is not None else config.threads))

    def map_ordered(self, fn: Callable[[T], R], items: Sequence[T]) -> List[R]:
        """
        Evaluate fn on every item and return results in input order.

        Completion order never affects the result list, so any reduction done
        afterwards is independent of the thread count. The first failing item
        (by position) is re-raised.
        """
        items = list(items)
        if self.max_workers == 1 or len(items) <= 1:
            return [fn(item) for item in items]

        results: List[Optional[R]] = [None] * len(items)
        failures = {}
        with ThreadPoolExecutor(max_workers=min(self.max_workers, len(items))) as executor:
            futures = {executor.submit(fn, item): i for i, item in enumerate(items)}
            for future in as_completed(futures):
                index = futures[future]
                try:
                    results[index] = future.result()
                except Exception as e:
                    logger.error(f"Node {index} failed: {e}")
                    failures[index] = e
        if failures:
            raise failures[min(failures)]
        return results


def run_ordered(fn: Callable[[T], R], items: Sequence[T], pool: Optional[NodePool] = None) -> List[R]:
    if pool is None:
        return [fn(item) for item in items]
    return pool.map_ordered(fn, items)
