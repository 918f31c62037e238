"""Counter-based random streams.

Every replica owns a 64-bit key derived from ``(master seed, replica index)``.
Draw ``k`` of that replica is ``mix64(key + k * GOLDEN)``, so any draw can be
recomputed without touching shared state.  Both kernel backends use the same
arithmetic and therefore produce bit-identical walks.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_REPLICA_GAMMA = np.uint64(0xD1B54A32D192ED03)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S32 = np.uint64(32)
_S11 = np.uint64(11)
_LO32 = np.uint64(0xFFFFFFFF)
INV_2_32 = 1.0 / 4294967296.0
INV_2_53 = 1.0 / 9007199254740992.0

_U64_MAX = (1 << 64) - 1


def mix64(z: np.ndarray) -> np.ndarray:
    """SplitMix64 finalizer, vectorized over uint64 arrays (wrapping arithmetic)."""
    z = np.asarray(z, dtype=np.uint64)
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= _U64_MAX:
        raise ValueError(f"master seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def replica_keys(seed: int, replicas) -> np.ndarray:
    """Stream keys for the given replica indices (any iterable of ints >= 0)."""
    seed = _check_seed(seed)
    idx = np.asarray(replicas, dtype=np.int64)
    if idx.size and idx.min() < 0:
        raise ValueError("replica indices must be non-negative")
    base = mix64(np.array([seed], dtype=np.uint64))
    return mix64(base + (idx.astype(np.uint64) + np.uint64(1)) * _REPLICA_GAMMA)


def split_uniforms(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split 64-bit words into two 32-bit uniforms on [0, 1): (recall, branch)."""
    z = np.asarray(z, dtype=np.uint64)
    return (z >> _S32) * INV_2_32, (z & _LO32) * INV_2_32


def counter_words(keys: np.ndarray, k: int) -> np.ndarray:
    """The draw with counter ``k`` for every key."""
    return mix64(np.asarray(keys, dtype=np.uint64) + np.full(1, k, dtype=np.uint64) * GOLDEN)


def scale_uniform(keys: np.ndarray) -> np.ndarray:
    """53-bit uniform reserved for per-replica scale factors (counter 0)."""
    return (mix64(np.asarray(keys, dtype=np.uint64)) >> _S11) * INV_2_53


@dataclass
class RngStream:
    """One replica's stream.  ``next_word`` walks the counter forward."""

    seed: int
    replica: int = 0
    counter: int = field(default=0, repr=False)

    def __post_init__(self) -> None:
        self.seed = _check_seed(self.seed)
        if self.replica < 0:
            raise ValueError("replica index must be non-negative")

    @property
    def key(self) -> np.uint64:
        return replica_keys(self.seed, [self.replica])[0]

    def next_word(self) -> np.uint64:
        self.counter += 1
        return counter_words(np.array([self.key]), self.counter)[0]

    def next_words(self, size: int) -> np.ndarray:
        ks = np.arange(self.counter + 1, self.counter + size + 1, dtype=np.uint64)
        self.counter += size
        return mix64(self.key + ks * GOLDEN)
