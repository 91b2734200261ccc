"""Seeded, splittable random streams"""
from __future__ import annotations

import hashlib
from typing import Union

import numpy as np

Key = Union[int, str]


def _key_to_int(key: Key) -> int:
    if isinstance(key, (int, np.integer)):
        if key < 0:
            raise ValueError(f"stream keys must be non-negative, got {key}")
        return int(key)
    digest = hashlib.sha256(str(key).encode("utf-8")).digest()
    return int.from_bytes(digest[:4], "little")


class Rng:
    """PCG64 stream addressed by a 64-bit seed and a path of child keys.

    Children are independent of the parent's draw history, so
    `Rng(7).child("init", 3)` yields the same stream on every platform no
    matter what was drawn before.
    """

    def __init__(self, seed: int, path: tuple = ()):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self.path = tuple(path)
        sequence = np.random.SeedSequence(self.seed, spawn_key=self.path)
        self.generator = np.random.Generator(np.random.PCG64(sequence))

    def child(self, *keys: Key) -> "Rng":
        return Rng(self.seed, self.path + tuple(_key_to_int(k) for k in keys))

    def split(self, n: int) -> list:
        return [self.child(i) for i in range(n)]

    def uniform(self, low=0.0, high=1.0, size=None, dtype=np.float64):
        return np.asarray(self.generator.uniform(low, high, size=size), dtype=dtype)

    def normal(self, loc=0.0, scale=1.0, size=None):
        return self.generator.normal(loc, scale, size=size)

    def integers(self, low, high=None, size=None):
        return self.generator.integers(low, high, size=size)

    def choice(self, n, size=None, p=None):
        return self.generator.choice(n, size=size, p=p)

    def permutation(self, n):
        return self.generator.permutation(n)

    def phase(self, shape):
        """Uniform random phases in [-pi, pi)"""
        return self.generator.uniform(-np.pi, np.pi, size=shape)

    def __repr__(self):
        return f"Rng(seed={self.seed}, path={self.path})"
