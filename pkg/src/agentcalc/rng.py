"""Counter-based uniform draws.

Every draw is addressed by its coordinates: master seed, trajectory index,
stage path, step index and draw kind. A keyed BLAKE2b hash of
``(seed, path, step, kind)`` gives a 64-bit base for the coordinate; the
trajectory index then advances a SplitMix64 sequence from that base. Draws
are therefore independent of evaluation order and of how trajectories are
split across workers, and a whole block of trajectories can be drawn at
once with numpy.
"""
from __future__ import annotations

import hashlib
import struct
from functools import lru_cache

import numpy as np

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_SCALE = 2.0 ** -53


@lru_cache(maxsize=4096)
def _base(seed: int, path: str, step: int, kind: str) -> int:
    msg = f"{path}\x1f{step}\x1f{kind}".encode()
    key = struct.pack("<Q", seed & _MASK64)
    return int.from_bytes(hashlib.blake2b(msg, key=key, digest_size=8).digest(), "little")


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * _M1) & _MASK64
    z = ((z ^ (z >> 27)) * _M2) & _MASK64
    return z ^ (z >> 31)


class CounterStream:
    """Scalar view of the draws belonging to one trajectory."""

    __slots__ = ("seed", "trajectory")

    def __init__(self, seed: int, trajectory: int = 0):
        self.seed = seed
        self.trajectory = trajectory

    def uniform(self, path: str, step: int, kind: str) -> float:
        """Uniform in [0, 1) with 53 random bits."""
        z = (_base(self.seed, path, step, kind) + (self.trajectory + 1) * _GAMMA) & _MASK64
        return (_mix(z) >> 11) * _SCALE


_U30, _U27, _U31, _U11 = (np.uint64(k) for k in (30, 27, 31, 11))


def uniforms(seed: int, trajectories: np.ndarray, path: str, step: int, kind: str) -> np.ndarray:
    """The same draws as :meth:`CounterStream.uniform`, for many trajectories at once."""
    t = np.asarray(trajectories, dtype=np.uint64)
    z = np.uint64(_base(seed, path, step, kind)) + (t + np.uint64(1)) * np.uint64(_GAMMA)
    z = (z ^ (z >> _U30)) * np.uint64(_M1)
    z = (z ^ (z >> _U27)) * np.uint64(_M2)
    z = z ^ (z >> _U31)
    return (z >> _U11).astype(np.float64) * _SCALE
