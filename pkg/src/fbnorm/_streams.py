"""Index-keyed random streams and the thread cap shared by the Monte Carlo code.

Work is cut into fixed-size blocks whose generator depends only on
``(seed, block index)``, so results do not depend on how many threads run them.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

BLOCK_SIZE = 1 << 16


def block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block,))))


def thread_count() -> int:
    raw = os.environ.get("FBNORM_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = os.cpu_count() or 1
    return max(1, n)


def map_blocks(fn, blocks):
    """``[fn(b) for b in blocks]`` using up to ``FBNORM_THREADS`` threads, order preserved."""
    blocks = list(blocks)
    workers = min(thread_count(), len(blocks))
    if workers <= 1:
        return [fn(b) for b in blocks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, blocks))


def uniform_block(rng: np.random.Generator, size: int, p: int) -> np.ndarray:
    x = rng.standard_normal((size, p))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    return x
