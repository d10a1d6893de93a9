"""One round of a simultaneous-message-passing protocol.

Each of n players holds one sample, privatizes it through an LDP channel and
sends the single resulting message to a referee; there is no interaction
between players.  In a private-coin run each player's channel is fixed up
front.  In a public-coin run all players (and the referee) share a common
random seed and the channel assignment is a deterministic function of it;
conditioned on that seed the messages are again independent.

Determinism contract: a player's message is a pure function of
(master_seed, player index, their sample, their channel), so transcripts are
reproducible regardless of evaluation order or parallelism.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .rng import player_uniforms, substream

__all__ = ["PublicSeed", "Transcript", "partition_players", "run_private_coin", "run_public_coin"]


@dataclass(frozen=True)
class PublicSeed:
    """A shared 64-bit seed; identical seeds yield identical shared draws everywhere."""

    seed: int

    def stream(self, *path) -> np.random.Generator:
        return substream(self.seed, "public", *path)


@dataclass(frozen=True)
class Transcript:
    """The referee's view: every player's message, plus the shared seed if any.

    ``group_assignment`` maps player index to group id (-1 for players dropped
    by an equal-size partition); ``dropped`` makes that loss explicit so
    sample-complexity bookkeeping stays exact.
    """

    messages: tuple
    public_seed: Optional[PublicSeed]
    group_assignment: Optional[np.ndarray]
    dropped: int = 0

    @property
    def n_players(self) -> int:
        return len(self.messages)


def partition_players(n: int, groups) -> tuple[np.ndarray, int]:
    """Contiguous equal-size partition of players 0..n-1.

    ``groups`` is either a group count G (players split into G groups of
    floor(n/G), the surplus dropped) or an explicit list of group sizes.
    Returns (assignment, dropped) where assignment[i] is the group id of
    player i, or -1 if dropped.
    """
    assignment = np.full(n, -1, dtype=np.int64)
    if isinstance(groups, (int, np.integer)):
        g = int(groups)
        if g < 1 or g > n:
            raise ValueError(f"cannot split {n} players into {g} groups")
        size = n // g
        for j in range(g):
            assignment[j * size : (j + 1) * size] = j
        return assignment, n - g * size
    sizes = [int(s) for s in groups]
    if any(s < 1 for s in sizes) or sum(sizes) > n:
        raise ValueError(f"group sizes {sizes} infeasible for {n} players")
    start = 0
    for j, s in enumerate(sizes):
        assignment[start : start + s] = j
        start += s
    return assignment, n - start


def _as_channel_list(channel_assignment, n: int) -> list:
    if isinstance(channel_assignment, Sequence) and not hasattr(channel_assignment, "sample"):
        channels = list(channel_assignment)
        if len(channels) != n:
            raise ValueError(f"{len(channels)} channels for {n} players")
        return channels
    return [channel_assignment] * n


def _collect_messages(channels: list, samples: np.ndarray, master_seed: int) -> tuple:
    n = len(samples)
    if n == 0:
        return ()
    words = max(ch.words_per_sample for ch in channels)
    u = player_uniforms(master_seed, n, words)
    messages: list = [None] * n
    # Group contiguous runs of the same channel object so sampling vectorises.
    start = 0
    for i in range(1, n + 1):
        if i == n or channels[i] is not channels[start]:
            ch = channels[start]
            block = ch.sample_with_uniforms(samples[start:i], u[start:i])
            if block.ndim == 1:
                for off, bit in enumerate(block):
                    messages[start + off] = int(bit)
            else:
                for off, row in enumerate(block):
                    messages[start + off] = tuple(int(b) for b in row)
            start = i
    return tuple(messages)


def run_private_coin(channel_assignment, samples, master_seed: int) -> Transcript:
    """Run one private-coin SMP round: message i is channel_i applied to sample i."""
    samples = np.asarray(samples, dtype=np.int64)
    channels = _as_channel_list(channel_assignment, len(samples))
    return Transcript(
        messages=_collect_messages(channels, samples, master_seed),
        public_seed=None,
        group_assignment=None,
    )


def run_public_coin(
    protocol_setup: Callable[[np.random.Generator], object],
    samples,
    public_seed: PublicSeed,
    master_seed: int,
) -> Transcript:
    """Run one public-coin SMP round.

    ``protocol_setup`` receives the shared stream derived from the public seed
    and returns either a per-player channel list or a (channels, assignment)
    pair; the channel choice must depend on nothing but that stream.
    """
    samples = np.asarray(samples, dtype=np.int64)
    setup = protocol_setup(public_seed.stream("setup"))
    assignment = None
    dropped = 0
    if isinstance(setup, tuple) and len(setup) == 2:
        channels_spec, assignment = setup
        assignment = np.asarray(assignment, dtype=np.int64)
        dropped = int(np.sum(assignment < 0))
    else:
        channels_spec = setup
    channels = _as_channel_list(channels_spec, len(samples))
    return Transcript(
        messages=_collect_messages(channels, samples, master_seed),
        public_seed=public_seed,
        group_assignment=assignment,
        dropped=dropped,
    )
