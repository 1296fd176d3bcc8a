"""Deterministic seed derivation for parallel Monte Carlo runs.

All randomness flows from a master seed through numpy SeedSequences keyed
by integer namespaces (experiment index, replica index, ...), so replica
streams are independent of execution order and worker count.
"""

from __future__ import annotations

import numpy as np

__all__ = ["derive_seed_sequence", "derive_generator", "derive_kernel_seed"]


def derive_seed_sequence(master_seed: int, *keys: int) -> np.random.SeedSequence:
    """SeedSequence keyed by (master_seed, *keys)."""
    return np.random.SeedSequence(entropy=(int(master_seed),) + tuple(int(k) for k in keys))


def derive_generator(master_seed: int, *keys: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(derive_seed_sequence(master_seed, *keys)))


def derive_kernel_seed(master_seed: int, *keys: int) -> np.uint64:
    """64-bit seed for the in-kernel splitmix generator (returned as a numpy
    uint64 so compiled kernels accept the full range)."""
    state = derive_seed_sequence(master_seed, *keys).generate_state(1, np.uint64)
    return state[0]
