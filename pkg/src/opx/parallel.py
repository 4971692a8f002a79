"""Deterministic worker-pool helper for embarrassingly parallel grids.

Workers write into disjoint index ranges of preallocated arrays, so the
result is identical regardless of scheduling.  Thread count comes from
the argument, the OPX_THREADS environment variable, or os.cpu_count().
"""

import os
from concurrent.futures import ThreadPoolExecutor


def thread_count(requested=None):
    if requested is not None:
        return max(1, int(requested))
    env = os.environ.get("OPX_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def parallel_chunks(work, total, threads=None, min_chunk=64):
    """Call work(range_of_indices) over disjoint chunks covering range(total)."""
    nthreads = thread_count(threads)
    if nthreads <= 1 or total <= min_chunk:
        work(range(total))
        return
    chunk = max(min_chunk, (total + nthreads - 1) // nthreads)
    ranges = [range(i, min(i + chunk, total)) for i in range(0, total, chunk)]
    with ThreadPoolExecutor(max_workers=nthreads) as pool:
        list(pool.map(work, ranges))
