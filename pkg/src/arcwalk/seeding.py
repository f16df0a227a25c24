"""Seed handling for reproducible, parallel Monte Carlo.

Every randomized routine takes an integer seed.  Independent replicate
streams are derived as ``SeedSequence(master, spawn_key=(i,))`` so the
output of replicate ``i`` never depends on how many workers ran.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

import numpy as np

T = TypeVar("T")

THREADS_ENV = "ARCWALK_THREADS"


def make_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed)))


def replicate_rng(master_seed: int, index: int) -> np.random.Generator:
    """Generator for replicate ``index`` derived from ``master_seed``."""
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(int(index),))
    return np.random.default_rng(ss)


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def split_counts(total: int, block: int) -> list[int]:
    """Fixed-size blocks; the last one takes the remainder."""
    if total <= 0:
        return []
    counts = [block] * (total // block)
    if total % block:
        counts.append(total % block)
    return counts


def map_replicates(fn: Callable[[np.random.Generator, int], T],
                   counts: Sequence[int], master_seed: int) -> list[T]:
    """Run ``fn(rng_i, counts[i])`` for every block, ordered by block index.

    numpy releases the GIL inside its samplers, so a thread pool gives real
    overlap for the large array work done here.
    """
    jobs = [(replicate_rng(master_seed, i), c) for i, c in enumerate(counts)]
    n_workers = min(worker_count(), len(jobs))
    if n_workers <= 1:
        return [fn(rng, c) for rng, c in jobs]
    with ThreadPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(lambda job: fn(*job), jobs))
