"""Seeded random number streams.

All stochastic code draws from a counter-based Philox generator
(``philox4x64``).  Streams are keyed by ``(seed, stream)`` so that parallel
chains never overlap and a run is reproducible from its manifest alone.
"""

from __future__ import annotations

import numpy as np

RNG_ALGORITHM = "philox4x64"


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Return the generator for chain ``stream`` of a run seeded by ``seed``."""
    bits = np.random.Philox(key=(np.uint64(seed & 0xFFFFFFFFFFFFFFFF),
                                 np.uint64(stream & 0xFFFFFFFFFFFFFFFF)))
    return np.random.Generator(bits)
