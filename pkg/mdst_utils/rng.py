"""
Random streams for reproducible replicates.

Every replicate draws from its own NumPy generator, derived from a master seed
and an integer key with ``numpy.random.SeedSequence``. The recursive samplers
additionally need uniforms addressed by position in a tree, which come from a
counter-based SplitMix64 hash.
"""

from typing import Union

import numpy as np

from mdst_utils.errors import InvalidParameterError

SeedLike = Union[int, np.random.Generator]

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_BRANCH = np.uint64(0xD6E8FEB86659FD93)
_SHIFT30 = np.uint64(30)
_SHIFT27 = np.uint64(27)
_SHIFT31 = np.uint64(31)
_SHIFT12 = np.uint64(12)


def _check_seed(master_seed: int) -> int:
    if int(master_seed) < 0:
        raise InvalidParameterError(f"Seed must be non-negative, got {master_seed}")
    return int(master_seed)


def replicate_seed(master_seed: int, *key: int) -> int:
    """
    Derive an integer seed for the stream identified by ``key``.

    Args:
        master_seed: Non-negative experiment seed
        *key: Non-negative integers naming the stream, e.g. (n, replicate)

    Returns:
        A 64-bit integer, identical for identical (master_seed, key)
    """
    seq = np.random.SeedSequence(_check_seed(master_seed), spawn_key=tuple(int(k) for k in key))
    return int(seq.generate_state(1, np.uint64)[0])


def replicate_rng(master_seed: int, *key: int) -> np.random.Generator:
    """Return an independent generator for the stream identified by ``key``."""
    seq = np.random.SeedSequence(_check_seed(master_seed), spawn_key=tuple(int(k) for k in key))
    return np.random.default_rng(seq)


def as_generator(seed: SeedLike) -> np.random.Generator:
    """Accept either a seed or an existing generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(_check_seed(seed))


def splitmix64(values: np.ndarray) -> np.ndarray:
    """Apply the SplitMix64 finaliser elementwise to a uint64 array."""
    with np.errstate(over='ignore'):
        z = np.asarray(values, dtype=np.uint64) + _GOLDEN
        z = (z ^ (z >> _SHIFT30)) * _MIX1
        z = (z ^ (z >> _SHIFT27)) * _MIX2
        return z ^ (z >> _SHIFT31)


def child_keys(keys: np.ndarray, branch: int) -> np.ndarray:
    """Keys of the ``branch``-th children (1 or 2) of the nodes with ``keys``."""
    with np.errstate(over='ignore'):
        return splitmix64(keys ^ (np.uint64(branch) * _BRANCH))


def keyed_uniforms(keys: np.ndarray) -> np.ndarray:
    """Map uint64 keys to uniforms strictly inside (0, 1)."""
    bits = splitmix64(keys) >> _SHIFT12
    return (bits.astype(np.float64) + 0.5) * 2.0 ** -52


def sample_keys(seed: int, size: int, offset: int = 0) -> np.ndarray:
    """Root keys for ``size`` independent tree samples of a seeded batch."""
    base = np.uint64(replicate_seed(seed))
    with np.errstate(over='ignore'):
        return splitmix64(base + np.arange(offset, offset + size, dtype=np.uint64))
