"""Process fan-out for independent realizations.

Jobs are pure functions of their argument (realizations derive all
randomness from their own seed), results are collected in submission
order, and every reduction downstream runs in realization-index order,
so outputs are bitwise identical for any worker count.
"""

import multiprocessing
import os

WORKERS_ENV = "SFFLAB_WORKERS"


def worker_count() -> int:
    """Workers from the SFFLAB_WORKERS environment, default all cores."""
    raw = os.environ.get(WORKERS_ENV, "")
    if raw.strip():
        n = int(raw)
        if n < 1:
            raise ValueError(f"{WORKERS_ENV} must be >= 1, got {n}")
        return n
    return os.cpu_count() or 1


def map_indexed(func, args_list, workers: int | None = None) -> list:
    """func over args_list, order preserving; sequential when workers <= 1."""
    args_list = list(args_list)
    if workers is None:
        workers = worker_count()
    if workers <= 1 or len(args_list) <= 1:
        return [func(a) for a in args_list]
    workers = min(workers, len(args_list))
    chunk = max(1, len(args_list) // (4 * workers))
    with multiprocessing.Pool(processes=workers) as pool:
        return pool.map(func, args_list, chunksize=chunk)
