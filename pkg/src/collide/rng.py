"""Deterministic random-stream derivation for reproducible sampling.

Trials are organized into fixed-size blocks.  Block i of a run with
master seed s draws from a counter-based Philox generator keyed by the
pair (s, i), so every trial's randomness is a pure function of the
master seed and its own index range.  Work can then be distributed over
any number of workers, in any order, without changing a single bit of
the output.

BLOCK is part of that contract: changing it changes which stream a
given trial reads, i.e. produces a different (still valid) realization.
"""

from __future__ import annotations

import numpy as np

__all__ = ["BLOCK", "block_rng", "block_spans"]

BLOCK = 8192

_U64_MASK = (1 << 64) - 1


def block_rng(seed: int, block: int) -> np.random.Generator:
    """Generator for one trial block, keyed by (seed, block index)."""
    if block < 0:
        raise ValueError(f"block index must be >= 0, got {block}")
    key = np.array([int(seed) & _U64_MASK, int(block)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def block_spans(n: int) -> list[tuple[int, int, int]]:
    """Split n trials into (block index, first trial index, count) spans."""
    if n < 0:
        raise ValueError(f"trial count must be >= 0, got {n}")
    spans = []
    start = 0
    block = 0
    while start < n:
        count = min(BLOCK, n - start)
        spans.append((block, start, count))
        start += count
        block += 1
    return spans
