"""Per-user fan-out of recommendation work.

Worker count comes from the argument or the ``TIMEPOP_WORKERS`` environment
variable (default 1).  Results are merged into a dict keyed by user id in
input order, so output never depends on the number of workers.
"""

from __future__ import annotations

import multiprocessing as mp
import os
from concurrent.futures import ProcessPoolExecutor

WORKERS_ENV = "TIMEPOP_WORKERS"

_state = {}


def worker_count(workers: int | None = None) -> int:
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1") or 1)
    return max(1, workers)


def _run_chunk(users):
    dataset, recommender, ctx = _state["job"]
    return [(u, recommender(dataset, u, ctx)) for u in users]


def recommend_all(dataset, users, recommender, ctx, workers: int | None = None) -> dict:
    users = list(users)
    workers = worker_count(workers)
    if workers == 1 or len(users) < 2 or "fork" not in mp.get_all_start_methods():
        return {u: recommender(dataset, u, ctx) for u in users}
    # forked children inherit the dataset through module state, no pickling
    _state["job"] = (dataset, recommender, ctx)
    try:
        size = max(1, len(users) // (workers * 4))
        chunks = [users[k:k + size] for k in range(0, len(users), size)]
        with ProcessPoolExecutor(workers, mp_context=mp.get_context("fork")) as pool:
            merged = dict(pair for part in pool.map(_run_chunk, chunks) for pair in part)
    finally:
        _state.pop("job", None)
    return {u: merged[u] for u in users}
