"""Split a range of trial indices into chunks and run them on worker processes."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, TypeVar

R = TypeVar("R")

CHUNKS_PER_WORKER = 4


def chunk_bounds(total: int, workers: int, start: int = 0) -> list[tuple[int, int]]:
    n_chunks = max(1, min(total, workers * CHUNKS_PER_WORKER)) if workers > 1 else 1
    bounds = []
    for c in range(n_chunks):
        lo = start + total * c // n_chunks
        hi = start + total * (c + 1) // n_chunks
        bounds.append((lo, hi))
    return bounds


def map_chunks(
    fn: Callable[[tuple], R], job: tuple, total: int, workers: int = 1, start: int = 0
) -> list[R]:
    """Call ``fn(job + (lo, hi))`` for each chunk; results come back in chunk order."""
    if workers < 1:
        raise ValueError("workers must be at least 1")
    tasks = [job + bounds for bounds in chunk_bounds(total, workers, start)]
    if workers == 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))
