"""Splittable, counter-based random streams for reproducible parallel runs.

Every trajectory (and every disorder/phase realization) gets its own 64-bit
key derived from the master seed with a SplitMix64 finalizer.  Key derivation
is O(1) in the index, so streams can be created in any order by any worker
and the results are independent of scheduling.  The keys feed Philox
counter-based generators.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

# Stream namespaces, so measurement noise and disorder draws never collide.
TRAJECTORY_STREAM = 1
REALIZATION_STREAM = 2


def split_seed(key: int, index: int) -> int:
    """Derive the `index`-th child key of `key` (SplitMix64 output function)."""
    if index < 0:
        raise ValueError(f"stream index must be >= 0, got {index}")
    z = (key + (index + 1) * _GAMMA) & _MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def stream_key(master_seed: int, stream: int, index: int) -> int:
    """64-bit key for stream family `stream` (see module constants), member `index`."""
    return split_seed(split_seed(master_seed & _MASK64, stream), index)


def generator(key: int) -> np.random.Generator:
    """Philox generator positioned at the start of the stream identified by `key`."""
    return np.random.Generator(np.random.Philox(key=key & _MASK64))
