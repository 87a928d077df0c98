"""Deterministic, content-keyed Philox substreams.

Streams are keyed by (master seed, labels) through a blake2b hash, so the
stream assigned to a given (model, T, trial, purpose) tuple never depends on
which other cells exist in a sweep or on execution order.
"""

import hashlib

import numpy as np


def substream(seed: int, *labels) -> np.random.Generator:
    """Return a Generator keyed by the master seed and a tuple of labels."""
    tag = "|".join(str(label) for label in labels).encode()
    digest = hashlib.blake2b(tag, digest_size=16).digest()
    words = tuple(
        int.from_bytes(digest[i : i + 4], "little") for i in range(0, 16, 4)
    )
    ss = np.random.SeedSequence(entropy=seed & 0xFFFFFFFFFFFFFFFF, spawn_key=words)
    return np.random.Generator(np.random.Philox(ss))
