import asyncio
import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, List, Sequence, TypeVar

import config

logger = logging.getLogger(__name__)

Job = TypeVar("Job")
Result = TypeVar("Result")


class ExperimentScheduler:
    """Runs independent jobs, in worker processes when workers > 1"""

    def __init__(self, workers: int = config.WORKERS):
        self.workers = max(1, int(workers))
        self.completed = 0

    def run_all(self, run: Callable[[Job], Result], jobs: Sequence[Job]) -> List[Result]:
        """Results in job order, whatever order the jobs finish in.

        run must be a module-level function so worker processes can unpickle it.
        """
        self.completed = 0
        if self.workers == 1 or len(jobs) <= 1:
            return [self._finish(run(job), len(jobs)) for job in jobs]
        return asyncio.run(self._run_pool(run, jobs))

    async def _run_pool(self, run: Callable[[Job], Result], jobs: Sequence[Job]) -> List[Result]:
        loop = asyncio.get_running_loop()
        logger.info("Scheduling %d jobs on %d workers", len(jobs), self.workers)

        with ProcessPoolExecutor(max_workers=self.workers) as pool:
            async def run_one(job: Job) -> Result:
                result = await loop.run_in_executor(pool, run, job)
                return self._finish(result, len(jobs))

            return list(await asyncio.gather(*(run_one(job) for job in jobs)))

    def _finish(self, result: Result, total: int) -> Result:
        self.completed += 1
        logger.info("Finished job %d/%d", self.completed, total)
        return result
