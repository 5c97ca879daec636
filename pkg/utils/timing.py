import time
from contextlib import contextmanager
from typing import Dict, Iterator


@contextmanager
def lap(sink: Dict[str, float], name: str) -> Iterator[None]:
    """Add the wall time of the block to ``sink[name]`` in milliseconds."""
    start = time.perf_counter()
    try:
        yield
    finally:
        sink[name] = sink.get(name, 0.0) + (time.perf_counter() - start) * 1000.0
