"""
This module initializes the worker pool and random streams shared by the
simulation code.

Attributes:
    pool (WorkerPool): The pool used for replicate-level parallelism.
"""

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np


class WorkerPool:
    """
    Order-preserving map over a thread pool.

    Results come back in input order, so anything reduced from them is
    identical whatever the thread count.
    """

    def __init__(self):
        self.threads = 1

    def init_app(self, threads=0):
        """
        Configure the number of worker threads.

        Args:
            threads (int): Thread cap; 0 means one per CPU.
        """
        threads = int(threads)
        if threads < 0:
            raise ValueError("thread count must be nonnegative")
        self.threads = threads or (os.cpu_count() or 1)

    def map(self, func, items):
        items = list(items)
        if self.threads <= 1 or len(items) < 2:
            return [func(item) for item in items]
        with ThreadPoolExecutor(max_workers=self.threads) as executor:
            return list(executor.map(func, items))


def rng_stream(seed, *key):
    """
    Independent generator keyed by (seed, *key).

    Streams are derived with SeedSequence spawn keys, so replicate ``k``
    draws the same numbers no matter which thread runs it.
    """
    entropy = int(seed) & 0xFFFFFFFFFFFFFFFF
    spawn_key = tuple(int(k) for k in key)
    return np.random.default_rng(
        np.random.SeedSequence(entropy=entropy, spawn_key=spawn_key))


pool = WorkerPool()
