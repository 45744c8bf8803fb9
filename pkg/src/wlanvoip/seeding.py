"""Seed derivation. Every stream is a pure function of integers, never the clock."""

from __future__ import annotations

import numpy as np


def derive_seed(base: int, *path: int) -> int:
    """Child seed for ``path`` under ``base`` (63-bit, stable across platforms)."""
    ss = np.random.SeedSequence(entropy=int(base), spawn_key=tuple(int(p) for p in path))
    return int(ss.generate_state(1, np.uint64)[0] >> np.uint64(1))


def expand_seeds(base_seed: int, count: int) -> list[int]:
    """``count`` seeds derived from ``base_seed``: ``derive_seed(base_seed, i)`` for i in range(count)."""
    return [derive_seed(base_seed, i) for i in range(count)]
