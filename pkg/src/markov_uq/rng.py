"""Reproducible random-stream derivation.

Contract: every stochastic routine takes a master seed and derives child
streams through numpy SeedSequence spawn keys, never by consuming draws from
a shared generator. Concretely:

* ``substream(seed, *key)`` -> a PCG64 Generator for the given key tuple.
  Independent keys give statistically independent streams; the mapping
  (seed, key) -> stream is fixed and platform-independent.
* ``path_seeds(seed, stream, n)`` -> n uint32 words, one per path, from
  ``SeedSequence(seed, spawn_key=(stream,))``. Word i depends only on
  (seed, stream, i), so per-path simulation kernels that re-seed from word
  i are reproducible regardless of execution order or worker count.

Reductions over per-path outputs are done with numpy's pairwise summation
on arrays indexed by path, which is deterministic for a fixed path count.
"""

from __future__ import annotations

import numpy as np

__all__ = ["substream", "path_seeds"]


def substream(seed: int, *key: int) -> np.random.Generator:
    """Generator for child stream `key` of `seed`."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


def path_seeds(seed: int, stream: int, n: int) -> np.ndarray:
    """n per-path 32-bit seed words for (seed, stream), as int64."""
    ss = np.random.SeedSequence(seed, spawn_key=(stream,))
    return ss.generate_state(n, np.uint32).astype(np.int64)
