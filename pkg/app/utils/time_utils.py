"""
Wall-clock measurement for the pipeline's static and runtime phases.
"""
import time
from contextlib import contextmanager
from typing import Iterator


class Stopwatch:
    """Accumulates elapsed milliseconds per named phase"""

    def __init__(self):
        self.totals: dict[str, float] = {}

    @contextmanager
    def phase(self, name: str) -> Iterator[None]:
        start = time.perf_counter()
        try:
            yield
        finally:
            elapsed = (time.perf_counter() - start) * 1000.0
            self.totals[name] = self.totals.get(name, 0.0) + elapsed

    def ms(self, name: str) -> float:
        return self.totals.get(name, 0.0)
