"""
Concurrency utilities for running independent verification tasks.
"""
import concurrent.futures
from typing import Any, Callable, Dict, List, Optional, Tuple

from loguru import logger

from config.settings import MAX_THREADS


class ThreadPool:
    """
    Thread pool for independent checks.

    Features:
    - Execute tasks in parallel using threads
    - Results come back in submission order, whatever the completion order
    - Progress callback per completed task
    - Usable as a context manager
    """

    def __init__(self, max_workers: Optional[int] = None):
        """
        Initialize thread pool.

        Args:
            max_workers: Maximum number of worker threads
        """
        self.max_workers = max(1, max_workers or MAX_THREADS)
        self.executor = concurrent.futures.ThreadPoolExecutor(max_workers=self.max_workers)
        logger.debug(f"Thread pool initialized with {self.max_workers} workers")

    def __enter__(self) -> "ThreadPool":
        return self

    def __exit__(self, exc_type, exc, tb) -> bool:
        self.shutdown()
        return False

    def execute(self, tasks: List[Tuple[Callable, List[Any], Dict[str, Any]]],
                progress_callback: Optional[Callable[[Any], None]] = None) -> List[Any]:
        """
        Execute multiple tasks in parallel.

        Args:
            tasks: List of tuples (function, args, kwargs)
            progress_callback: Optional callback called with each result as it completes

        Returns:
            List of results, in the order of ``tasks``

        Raises:
            The first exception raised by a task, after logging it
        """
        futures = [self.executor.submit(func, *args, **kwargs) for func, args, kwargs in tasks]
        index = {future: i for i, future in enumerate(futures)}
        results: List[Any] = [None] * len(futures)
        for future in concurrent.futures.as_completed(futures):
            try:
                result = future.result()
            except Exception as e:
                logger.error(f"Task {index[future]} failed: {e}")
                for pending in futures:
                    pending.cancel()
                raise
            results[index[future]] = result
            if progress_callback:
                progress_callback(result)
        return results

    def shutdown(self):
        """Shut down the thread pool."""
        self.executor.shutdown(wait=True)
        logger.debug("Thread pool shut down")
