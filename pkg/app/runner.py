import asyncio
import logging
import time
from concurrent.futures import Executor, ProcessPoolExecutor
from typing import Any, AsyncIterator, Callable, Dict, List, Optional, Sequence

from app.config import Config, get_config

logger = logging.getLogger(__name__)


class AsyncCandidateRunner:
    """
    Runs independent solver candidates in a process pool, batch by batch.

    Results always come back in input order, so the outcome does not depend
    on the worker count or on scheduling.
    """

    def __init__(self, config: Config, jobs: Optional[int] = None):
        self.config = config
        self.jobs = jobs if jobs is not None else config.get_int('SOLVER_JOBS')
        self.initial_batch_size = int(config.get('INITIAL_BATCH_SIZE'))
        self.max_batch_size = int(config.get('MAX_BATCH_SIZE'))
        self.batch_size_factor = float(config.get('BATCH_SIZE_FACTOR'))

    def _executor(self) -> Executor:
        return ProcessPoolExecutor(max_workers=max(1, self.jobs))

    async def run_batches(self, worker: Callable[..., Any], items: Sequence[Any],
                          *shared: Any) -> AsyncIterator[Dict[str, Any]]:
        """Yield one progress record per batch; `worker(*shared, item)` runs in a child process."""
        loop = asyncio.get_running_loop()
        batch_size = self.initial_batch_size
        total_items = len(items)

        with self._executor() as executor:
            async def process_batch(batch: Sequence[Any]) -> List[Any]:
                tasks = [loop.run_in_executor(executor, worker, *shared, item) for item in batch]
                return await asyncio.gather(*tasks)

            processed_items = 0
            current_batch = 0
            while processed_items < total_items:
                batch_items = items[processed_items:processed_items + batch_size]
                batch_start_time = time.time()
                batch_results = await process_batch(batch_items)
                batch_execution_time = time.time() - batch_start_time

                current_batch += 1
                processed_items += len(batch_items)

                yield {
                    "batch_items": batch_items,
                    "batch_results": batch_results,
                    "batch_size": batch_size,
                    "batch_execution_time": batch_execution_time,
                    "current_batch": current_batch,
                    "processed_items": processed_items,
                    "total_items": total_items,
                }

                # Adjust batch size based on performance
                if batch_execution_time < 1.0:
                    batch_size = min(int(batch_size * self.batch_size_factor), self.max_batch_size)
                elif batch_execution_time > 5.0:
                    batch_size = max(int(batch_size / self.batch_size_factor), self.initial_batch_size)

                logger.info(f"Batch {current_batch} processed ({processed_items}/{total_items}). "
                            f"Execution time: {batch_execution_time:.2f}s. "
                            f"New batch size: {batch_size}")

    async def run_all(self, worker: Callable[..., Any], items: Sequence[Any], *shared: Any) -> List[Any]:
        results: List[Any] = []
        async for batch in self.run_batches(worker, items, *shared):
            results.extend(batch["batch_results"])
        return results

    def run(self, worker: Callable[..., Any], items: Sequence[Any], *shared: Any) -> List[Any]:
        return asyncio.run(self.run_all(worker, items, *shared))


# Example usage
if __name__ == "__main__":
    runner = AsyncCandidateRunner(get_config())
    print(runner.run(abs, [-3, -2, -1]))
