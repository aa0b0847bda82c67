"""Counter-based random streams.

Every stochastic routine draws its randomness in fixed-size blocks.  Block
``b`` of stream ``stream`` under ``seed`` is produced by a Philox generator
keyed on ``(seed, stream)`` and advanced to counter ``b * _BLOCK_STRIDE``, so a
sample's value depends only on ``(seed, stream, sample index)`` and never on
evaluation order.
"""

from __future__ import annotations

from typing import Callable, Iterator

import numpy as np

BLOCK = 65536
_BLOCK_STRIDE = 1 << 40

# stream ids, one per purpose
COMPONENT = 1
GAUSS = 2
DIRECTION = 3
RADIUS = 4
PARAMS = 5


def block_generator(seed: int, stream: int, block: int) -> np.random.Generator:
    bitgen = np.random.Philox(key=[int(seed) & (2**64 - 1), int(stream)])
    bitgen.advance(int(block) * _BLOCK_STRIDE)
    return np.random.Generator(bitgen)


def iter_blocks(total: int, block: int = BLOCK) -> Iterator[tuple[int, int, int]]:
    """Yield ``(block_index, start, stop)`` covering ``range(total)``."""
    b = 0
    start = 0
    while start < total:
        stop = min(start + block, total)
        yield b, start, stop
        b += 1
        start = stop


def draw(
    seed: int,
    stream: int,
    total: int,
    sampler: Callable[[np.random.Generator, int], np.ndarray],
) -> np.ndarray:
    """Concatenate ``sampler(gen, size)`` over all blocks of ``total`` draws."""
    parts = [
        sampler(block_generator(seed, stream, b), stop - start)
        for b, start, stop in iter_blocks(total)
    ]
    if not parts:
        return sampler(block_generator(seed, stream, 0), 0)
    return np.concatenate(parts, axis=0)


def generator(seed: int, stream: int = PARAMS) -> np.random.Generator:
    """A single deterministic generator, for drawing parameters rather than samples."""
    return block_generator(seed, stream, 0)
