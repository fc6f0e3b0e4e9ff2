"""Deterministic chunked Monte-Carlo sampling.

Chunk i of a stream is generated from a counter-based Philox generator keyed
by (seed, i), and chunk results are combined in chunk order.  Estimates are
therefore bit-identical for a fixed (seed, n) regardless of how many worker
threads process the chunks.  CHAOSFLOW_THREADS caps the pool size.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

CHUNK = 1 << 13


def worker_count() -> int:
    raw = os.environ.get("CHAOSFLOW_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def chunk_generator(seed: int, index: int) -> np.random.Generator:
    key = np.array([np.uint64(seed & 0xFFFFFFFFFFFFFFFF), np.uint64(index)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def chunk_sizes(n: int, chunk: int = CHUNK) -> list[int]:
    full, rem = divmod(n, chunk)
    return [chunk] * full + ([rem] if rem else [])


def standard_normal(seed: int, n: int, dim: int) -> np.ndarray:
    """All n samples at once (small n); chunked like mc_accumulate."""
    parts = [
        chunk_generator(seed, i).standard_normal((sz, dim))
        for i, sz in enumerate(chunk_sizes(n))
    ]
    return np.concatenate(parts, axis=0) if parts else np.empty((0, dim))


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    std_error: float
    n: int

    def within(self, oracle: float, n_se: float = 3.0, extra: float = 0.0) -> bool:
        return abs(self.mean - oracle) <= n_se * self.std_error + extra


def mc_accumulate(f, seed: int, n: int, dim: int) -> MCEstimate:
    """Mean/SE of f over n standard-normal samples of dimension dim.

    ``f`` maps a (chunk, dim) array to a (chunk,) array.  Chunks may be
    evaluated by a thread pool; the combination order is fixed.
    """
    sizes = chunk_sizes(n)

    def one(args):
        i, sz = args
        vals = np.asarray(f(chunk_generator(seed, i).standard_normal((sz, dim))), dtype=float)
        return float(vals.sum()), float((vals * vals).sum())

    workers = worker_count()
    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(one, enumerate(sizes)))
    else:
        partials = [one(x) for x in enumerate(sizes)]
    s1 = 0.0
    s2 = 0.0
    for a, b in partials:
        s1 += a
        s2 += b
    mean = s1 / n
    var = max(s2 / n - mean * mean, 0.0)
    return MCEstimate(mean=mean, std_error=float(np.sqrt(var / n)), n=n)
