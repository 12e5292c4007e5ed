"""Seeded random streams.

Every stream is a numpy ``Generator`` driven by the Philox-4x64 counter-based
bit generator, keyed through ``SeedSequence`` hashing.  Both pieces are
specified algorithms with platform-independent output, so a (master seed,
trial index) pair names the same stream on every machine and for any number
of worker processes.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1


def make_rng(seed: int) -> np.random.Generator:
    """Return a Philox stream for a 64-bit unsigned seed."""
    seed = int(seed)
    if not 0 <= seed <= MASK64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def derive_seed(master_seed: int, *index: int) -> int:
    """Mix a master seed with one or more indices into a 64-bit child seed."""
    words = [int(master_seed) & MASK64, *(int(i) for i in index)]
    state = np.random.SeedSequence(words).generate_state(1, dtype=np.uint64)
    return int(state[0])


def trial_rng(master_seed: int, *index: int) -> np.random.Generator:
    return make_rng(derive_seed(master_seed, *index))
