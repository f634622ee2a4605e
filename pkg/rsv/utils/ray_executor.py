from typing import Any, Callable, List, Optional, TypeVar

import ray

from rsv.utils.env import debug

T = TypeVar("T")


class RayExecutor:
    """Order-preserving parallel map over independent work items using Ray.

    Work items must carry their own seeds so that the result does not depend
    on the number of workers.
    """

    _initialized = False
    _num_cpus: Optional[int] = None

    @classmethod
    def initialize(cls, num_cpus: int):
        """Initialize Ray if not already initialized."""
        if not cls._initialized:
            ray.init(num_cpus=num_cpus, ignore_reinit_error=True, log_to_driver=False)
            cls._initialized = True
            cls._num_cpus = num_cpus
            debug(f"ray initialized with {num_cpus} workers")

    @classmethod
    def shutdown(cls):
        """Shutdown Ray."""
        if cls._initialized:
            ray.shutdown()
            cls._initialized = False
            cls._num_cpus = None

    @classmethod
    def map(
        cls,
        func: Callable[[T], Any],
        items: List[T],
        threads: int = 1,
        advance: Optional[Callable[[], None]] = None,
    ) -> List[Any]:
        """
        Apply a function to each item, in parallel when more than one thread is allowed.

        Args:
            func: The function to apply to each item
            items: The list of items to process
            threads: Maximum number of workers; 1 runs in-process
            advance: Optional callback invoked once per finished item

        Returns:
            A list of results in the order of `items`
        """
        if threads <= 1 or len(items) <= 1:
            results = []
            for item in items:
                results.append(func(item))
                if advance is not None:
                    advance()
            return results

        cls.initialize(num_cpus=threads)

        @ray.remote
        def remote_func(item):
            return func(item)

        results = []
        for i in range(0, len(items), threads):
            batch = items[i : i + threads]
            refs = [remote_func.remote(item) for item in batch]
            results.extend(ray.get(refs))
            if advance is not None:
                for _ in batch:
                    advance()

        return results
