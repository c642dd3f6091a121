"""Seeded, stream-addressable random number state.

Every sampler takes an :class:`RngState` explicitly. The same ``(seed, stream)``
pair always reproduces the same sequence of draws, and distinct streams under
one seed are statistically independent (``SeedSequence`` spawn keys).
"""

from __future__ import annotations

import numpy as np

_MAX_SEED = 2**64


class RngState:
    """A PCG64 generator keyed by a 64-bit seed and a stream id.

    The underlying generator advances as draws are consumed, so one
    ``RngState`` must not be shared between concurrent workers; use
    :meth:`spawn` to obtain independent streams.
    """

    def __init__(self, seed: int, stream: int = 0):
        seed = int(seed)
        stream = int(stream)
        if not 0 <= seed < _MAX_SEED:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        if stream < 0:
            raise ValueError(f"stream must be non-negative, got {stream}")
        self.seed = seed
        self.stream = stream
        ss = np.random.SeedSequence(seed, spawn_key=(stream,))
        self.generator = np.random.Generator(np.random.PCG64(ss))

    def spawn(self, count: int) -> list["RngState"]:
        """Independent states on streams ``stream+1 .. stream+count`` of the same seed."""
        return [RngState(self.seed, self.stream + k) for k in range(1, count + 1)]

    def __repr__(self):
        return f"RngState(seed={self.seed}, stream={self.stream})"


def as_rng(rng) -> RngState:
    """Accept an ``RngState`` or a bare integer seed."""
    if isinstance(rng, RngState):
        return rng
    return RngState(rng)
