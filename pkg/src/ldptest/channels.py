"""Locally differentially private channels.

A channel W maps a data point x to a randomized message y and is rho-LDP
when max_y max_{x,x'} W(y|x') / W(y|x) <= e^rho.  Every channel here carries
both an exact conditional-probability evaluator (used for exhaustive privacy
certification and for small-instance enumeration oracles) and a vectorised
sampler (used for large Monte-Carlo runs, where materialising the full
conditional matrix would be wasteful or impossible).

Two families are provided:

* ``RapporChannel`` -- one-hot encode x in {0,1}^k, then flip every bit
  independently with probability 1/(e^{rho/2} + 1).
* ``OneBitChannel`` -- emit a single bit whose bias depends on x; this covers
  randomized response on a bit, the Hadamard-response bit for a column set,
  and "hash into a subset, then randomized response".

rho is validated as a finite positive real.  Channels are immutable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SamplingOnlyChannelError",
    "RapporParams",
    "rappor_params",
    "RapporChannel",
    "OneBitChannel",
    "rappor_channel",
    "hr_bit_channel",
    "rr_binary_channel",
    "subset_then_rr",
    "rr_flip_prob",
    "rr_shift",
    "rr_debias",
    "ldp_ratio",
    "certify_ldp",
]

LDP_REL_TOL = 1e-12


class SamplingOnlyChannelError(ValueError):
    """The channel's output space is too large to enumerate exactly."""


def _check_rho(rho: float):
    if not (isinstance(rho, (int, float)) and math.isfinite(rho) and rho > 0):
        raise ValueError(f"rho must be a finite positive real, got {rho!r}")


@dataclass(frozen=True)
class RapporParams:
    """Closed-form constants of the bit-flipping mechanism at privacy level rho.

    flip = 1/(e^{rho/2} + 1) is the per-bit flip probability; the induced
    coordinate law for input distribution p is Bernoulli(alpha * p(j) + beta)
    with alpha = 1 - 2*flip and beta = flip.
    """

    rho: float
    alpha: float
    beta: float
    flip: float


def rappor_params(rho: float) -> RapporParams:
    _check_rho(rho)
    e = math.exp(rho / 2.0)
    return RapporParams(rho=rho, alpha=(e - 1.0) / (e + 1.0), beta=1.0 / (e + 1.0), flip=1.0 / (e + 1.0))


def rr_flip_prob(rho: float) -> float:
    """Flip probability of binary randomized response: 1/(e^rho + 1)."""
    _check_rho(rho)
    return 1.0 / (math.exp(rho) + 1.0)


def rr_shift(bias: float, rho: float) -> float:
    """Output bias of binary randomized response applied to a Bernoulli(bias) input."""
    f = rr_flip_prob(rho)
    return f + bias * (1.0 - 2.0 * f)


def rr_debias(mean: float, rho: float) -> float:
    """Invert rr_shift: recover the input bias from an (empirical) output mean."""
    f = rr_flip_prob(rho)
    return (mean - f) / (1.0 - 2.0 * f)


@dataclass(frozen=True)
class RapporChannel:
    """One-hot encoding followed by independent per-bit flips."""

    k: int
    rho: float
    flip: float

    @property
    def input_size(self) -> int:
        return self.k

    @property
    def words_per_sample(self) -> int:
        return self.k

    def inputs(self):
        return range(1, self.k + 1)

    def prob(self, y, x: int) -> float:
        """Exact W(y | x) for a k-bit message y and input x in [k]."""
        bits = np.asarray(y, dtype=np.int64)
        if bits.shape != (self.k,):
            raise ValueError(f"message must be a {self.k}-bit vector")
        onehot = np.zeros(self.k, dtype=np.int64)
        onehot[x - 1] = 1
        flips = int(np.sum(bits != onehot))
        return self.flip**flips * (1.0 - self.flip) ** (self.k - flips)

    def outputs(self):
        """All 2^k messages, enumerable only for k <= 20."""
        if self.k > 20:
            raise SamplingOnlyChannelError(f"2^{self.k} messages cannot be enumerated")
        for code in range(2**self.k):
            yield np.array([(code >> j) & 1 for j in range(self.k)], dtype=np.int64)

    def sample(self, xs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.int64)
        return self.sample_with_uniforms(xs, rng.random((xs.shape[0], self.k)))

    def sample_with_uniforms(self, xs: np.ndarray, u: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.int64)
        onehot = (np.arange(1, self.k + 1)[None, :] == xs[:, None]).astype(np.uint8)
        flips = (u[:, : self.k] < self.flip).astype(np.uint8)
        return onehot ^ flips


@dataclass(frozen=True)
class OneBitChannel:
    """A channel emitting a single bit with input-dependent bias.

    ``p_one[i]`` is P(Y=1 | x = first + i); ``first`` is 0 for channels over
    bit inputs and 1 for channels over a domain [k].
    """

    rho: float
    p_one: np.ndarray
    first: int

    def __post_init__(self):
        p1 = np.asarray(self.p_one, dtype=np.float64)
        p1 = p1.copy()
        p1.setflags(write=False)
        object.__setattr__(self, "p_one", p1)

    @property
    def input_size(self) -> int:
        return self.p_one.shape[0]

    @property
    def words_per_sample(self) -> int:
        return 1

    def inputs(self):
        return range(self.first, self.first + self.input_size)

    def prob(self, y: int, x: int) -> float:
        p1 = float(self.p_one[x - self.first])
        return p1 if y == 1 else 1.0 - p1

    def outputs(self):
        yield 0
        yield 1

    def mean_under(self, p_mass: np.ndarray) -> float:
        """E[Y] when the input is drawn from the given mass vector."""
        return float(np.dot(np.asarray(p_mass), self.p_one))

    def sample(self, xs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.int64)
        return self.sample_with_uniforms(xs, rng.random((xs.shape[0], 1)))

    def sample_with_uniforms(self, xs: np.ndarray, u: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.int64)
        return (u[:, 0] < self.p_one[xs - self.first]).astype(np.uint8)


def rappor_channel(k: int, rho: float) -> RapporChannel:
    """The k-bit flipping mechanism at privacy level rho."""
    _check_rho(rho)
    if k < 1:
        raise ValueError("k must be >= 1")
    return RapporChannel(k=k, rho=rho, flip=rappor_params(rho).flip)


def hr_bit_channel(C, rho: float, input_size: int) -> OneBitChannel:
    """One-bit Hadamard response for column set C: report membership through RR.

    P(Y=1 | x) is e^rho/(e^rho+1) when x is in C and 1/(e^rho+1) otherwise, so
    E[Y] = ((e^rho - 1)/(e^rho + 1)) * p(C) + 1/(e^rho + 1) under x ~ p.
    """
    _check_rho(rho)
    lo = 1.0 / (math.exp(rho) + 1.0)
    hi = math.exp(rho) / (math.exp(rho) + 1.0)
    member = np.zeros(input_size, dtype=bool)
    idx = np.asarray(list(C) if isinstance(C, (set, frozenset)) else C, dtype=np.int64)
    if idx.size:
        inside = idx[(idx >= 1) & (idx <= input_size)]
        member[inside - 1] = True
    return OneBitChannel(rho=rho, p_one=np.where(member, hi, lo), first=1)


def rr_binary_channel(rho: float) -> OneBitChannel:
    """Binary randomized response: flip the input bit with probability 1/(e^rho+1)."""
    f = rr_flip_prob(rho)
    return OneBitChannel(rho=rho, p_one=np.array([f, 1.0 - f]), first=0)


def subset_then_rr(S, rho: float, input_size: int) -> OneBitChannel:
    """Convert x to the indicator of x in S, then apply binary randomized response.

    Preprocessing the input before an LDP channel preserves the privacy
    guarantee, so this is rho-LDP with the ratio actually attained only when
    S splits the domain.
    """
    f = rr_flip_prob(rho)
    member = np.zeros(input_size, dtype=bool)
    idx = np.asarray(list(S) if isinstance(S, (set, frozenset)) else S, dtype=np.int64)
    if idx.size:
        inside = idx[(idx >= 1) & (idx <= input_size)]
        member[inside - 1] = True
    return OneBitChannel(rho=rho, p_one=np.where(member, 1.0 - f, f), first=int(1))


def ldp_ratio(channel) -> float:
    """Exact worst-case likelihood ratio max_y max_{x,x'} W(y|x') / W(y|x).

    Returns math.inf when some output has zero probability under one input but
    not another.  Requires an enumerable output space (single bit, or a k-bit
    mechanism with k <= 20).
    """
    if isinstance(channel, OneBitChannel):
        best = 1.0
        for column in (channel.p_one, 1.0 - channel.p_one):
            hi, lo = float(np.max(column)), float(np.min(column))
            if hi > 0.0 and lo == 0.0:
                return math.inf
            if hi > 0.0:
                best = max(best, hi / lo)
        return best
    if isinstance(channel, RapporChannel):
        if channel.k > 20:
            raise SamplingOnlyChannelError(f"2^{channel.k} messages cannot be enumerated")
        k, f = channel.k, channel.flip
        if f == 0.0:
            return math.inf
        codes = np.arange(2**k, dtype=np.int64)
        bits = (codes[:, None] >> np.arange(k)[None, :]) & 1
        # Flip count for input x is |y| + 1 - 2*y_x; the ratio over inputs for a
        # fixed y depends only on the spread of flip counts.
        ones = bits.sum(axis=1)
        d = ones[:, None] + 1 - 2 * bits
        spread = (d.max(axis=1) - d.min(axis=1)).max()
        return ((1.0 - f) / f) ** int(spread)
    raise TypeError(f"unknown channel type {type(channel)!r}")


def certify_ldp(channel) -> bool:
    """True iff the exact ratio is at most e^rho, up to 1e-12 relative slack."""
    ratio = ldp_ratio(channel)
    return ratio <= math.exp(channel.rho) * (1.0 + LDP_REL_TOL)
