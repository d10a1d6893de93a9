"""Reproducible, splittable random streams.

Every stochastic component of the library draws from a stream addressed by a
master seed plus a path of labels, e.g. ``substream(seed, "trial", 17)``.
Streams are backed by the counter-based Philox generator, so independent
substreams can be handed to parallel workers without coordination and the
results do not depend on scheduling order.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["substream", "path_key", "player_uniforms"]


def path_key(label) -> int:
    """Map a path component (int or str) to a stable 32-bit integer."""
    if isinstance(label, (int, np.integer)):
        return int(label) & 0xFFFFFFFF
    digest = hashlib.blake2s(str(label).encode("utf-8"), digest_size=4).digest()
    return int.from_bytes(digest, "big")


def substream(master_seed: int, *path) -> np.random.Generator:
    """Derive an independent generator from a master seed and a label path.

    Identical (seed, path) pairs always yield identical streams; distinct
    paths yield statistically independent streams.
    """
    spawn = tuple(path_key(p) for p in path)
    seq = np.random.SeedSequence(int(master_seed) & (2**64 - 1), spawn_key=spawn)
    return np.random.Generator(np.random.Philox(seq))


def player_uniforms(master_seed: int, n: int, words: int = 1) -> np.ndarray:
    """Uniform(0,1) variates for n players, ``words`` per player.

    Row i belongs to player i: the draw is a single counter-based pass, so a
    player's randomness is a pure function of (master_seed, i) and independent
    of how the rows are later consumed or parallelised.
    """
    gen = substream(master_seed, "players")
    return gen.random((n, words))
