"""Deterministic random-stream derivation.

Every stochastic routine takes a numpy Generator derived from the root seed
and a structured path (experiment id, point id, chunk id).  Work is split
into fixed-size trial chunks, each with its own substream, so results are
identical for any worker count and any execution order.
"""

from __future__ import annotations

import numpy as np

# trials per substream chunk; fixed so that parallel scheduling cannot
# change which stream a trial draws from
CHUNK_TRIALS = 1024


def substream(seed: int, *path: int) -> np.random.Generator:
    """Generator for the given derivation path under the root seed."""
    ss = np.random.SeedSequence(entropy=int(seed),
                                spawn_key=tuple(int(p) for p in path))
    return np.random.default_rng(ss)


def chunk_sizes(trials: int) -> list:
    """Deterministic chunking of a trial count."""
    if trials < 0:
        raise ValueError("trial count must be non-negative")
    sizes = [CHUNK_TRIALS] * (trials // CHUNK_TRIALS)
    if trials % CHUNK_TRIALS:
        sizes.append(trials % CHUNK_TRIALS)
    return sizes
