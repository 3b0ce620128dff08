# stefanctl/utils/timing.py
import logging
import time
from collections import defaultdict
from contextlib import contextmanager
from typing import Dict

logger = logging.getLogger(__name__)

NS_PER_S = 1e9


class PerformanceTimer:
    """Wall-clock bookkeeping for one run or sweep.

    A step name may be timed repeatedly; its durations accumulate and the number of
    entries is kept alongside.
    """

    def __init__(self, run_id: str):
        self.run_id = run_id
        self._origin_ns = time.perf_counter_ns()
        self._elapsed_ns: Dict[str, int] = defaultdict(int)
        self._entries: Dict[str, int] = defaultdict(int)

    @contextmanager
    def time_step(self, step_name: str):
        started = time.perf_counter_ns()
        logger.debug(f"[{self.run_id}] {step_name} started")
        try:
            yield
        finally:
            spent = time.perf_counter_ns() - started
            self._elapsed_ns[step_name] += spent
            self._entries[step_name] += 1
            logger.debug(f"[{self.run_id}] {step_name} took {spent / NS_PER_S:.3f}s")

    def get_total_time(self) -> float:
        return (time.perf_counter_ns() - self._origin_ns) / NS_PER_S

    def timings(self) -> Dict[str, float]:
        """Accumulated seconds per step, in first-seen order"""
        return {name: ns / NS_PER_S for name, ns in self._elapsed_ns.items()}

    def log_summary(self):
        total = self.get_total_time()
        parts = []
        for name, seconds in self.timings().items():
            share = 100.0 * seconds / total if total > 0 else 0.0
            entries = self._entries[name]
            suffix = f" x{entries}" if entries > 1 else ""
            parts.append(f"{name} {seconds:.3f}s{suffix} ({share:.0f}%)")
        logger.info(f"[{self.run_id}] {total:.3f}s total: {', '.join(parts) or 'no steps'}")
