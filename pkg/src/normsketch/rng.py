"""Seed handling: every random object is derived from a 64-bit master seed
plus a tuple of stream keys, so streams never overlap and adding a stream
does not perturb the others."""
import zlib

import numpy as np


def _key(k):
    if isinstance(k, str):
        return zlib.crc32(k.encode("utf-8"))
    if isinstance(k, (bool, np.bool_)):
        return int(k)
    k = int(k)
    if k < 0:
        raise ValueError("stream keys must be non-negative")
    return k


def seed_sequence(seed, *keys):
    return np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=tuple(_key(k) for k in keys))


def derive_seed(seed, *keys):
    """A 64-bit seed for the stream ``keys`` under ``seed``."""
    return int(seed_sequence(seed, *keys).generate_state(1, np.uint64)[0])


def generator(seed, *keys):
    return np.random.Generator(np.random.PCG64(seed_sequence(seed, *keys)))
