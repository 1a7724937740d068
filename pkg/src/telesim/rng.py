"""Seeded, splittable random number generation.

All stochastic code in telesim draws from ``numpy.random.Generator`` streams
built here.  A run is reproduced from ``(seed,)`` alone; independent
substreams for parallel or per-run use are derived from ``(seed, index)``
via ``SeedSequence`` spawn keys, so concurrent execution cannot change any
emitted statistic.
"""
from __future__ import annotations

import numpy as np

# Recorded in experiment output metadata so artifacts name their generator.
RNG_ALGORITHM = "pcg64"


def make_rng(seed: int) -> np.random.Generator:
    """Root generator for a run."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def substream(seed: int, index: int) -> np.random.Generator:
    """Independent generator for run ``index`` of a batch seeded with ``seed``."""
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,)))
    )


def as_rng(rng_or_seed: np.random.Generator | int) -> np.random.Generator:
    """Accept either a ready generator or a bare integer seed."""
    if isinstance(rng_or_seed, np.random.Generator):
        return rng_or_seed
    return make_rng(int(rng_or_seed))
