"""Seeded random number streams.

Every stochastic routine in the package draws from a Philox counter-based
generator keyed by a user-supplied 64-bit seed.  Parallel work (Monte Carlo
replicates) uses one child stream per trajectory, derived by spawning the
root ``SeedSequence``; stream k of seed s is identical no matter how many
streams are requested or in which order they run.
"""

from __future__ import annotations

import numpy as np


def generator(seed) -> np.random.Generator:
    """Root generator for a single trajectory or experiment."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def spawn_generators(seed, n: int) -> list[np.random.Generator]:
    """Independent child streams 0..n-1 of the given seed."""
    root = np.random.SeedSequence(seed)
    return [np.random.Generator(np.random.Philox(s)) for s in root.spawn(n)]
