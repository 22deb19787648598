"""Counter-based random streams.

Every stochastic draw in the package comes from a Philox-4x64 generator whose
key is derived from ``(seed, *tags)`` and whose high counter words carry a
block index. A block's draws therefore depend only on the seed, the tags and
the block index, never on how blocks are scheduled.
"""
from __future__ import annotations

import zlib

import numpy as np

_MASK64 = (1 << 64) - 1


def _tag_word(tag) -> int:
    if isinstance(tag, (int, np.integer)):
        return int(tag) & 0xFFFFFFFF
    return zlib.crc32(str(tag).encode("utf-8"))


def stream_key(seed: int, *tags) -> np.ndarray:
    """Derive a 128-bit Philox key from a seed and a tuple of stream tags."""
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    ss = np.random.SeedSequence(
        [seed & 0xFFFFFFFF, (seed >> 32) & 0xFFFFFFFF],
        spawn_key=tuple(_tag_word(t) for t in tags),
    )
    return ss.generate_state(2, dtype=np.uint64)


def block_generator(key: np.ndarray, block: int) -> np.random.Generator:
    """Generator for one block; blocks are disjoint counter ranges."""
    counter = np.array([0, 0, block & _MASK64, 0], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key, counter=counter))
