"""Locally private identity testers.

Given n players holding i.i.d. samples from an unknown p over [k] and a
reference q known to the referee, decide "p = q" against "p is far from q".
Three testers are provided:

* ``rappor_identity_test`` -- each player sends a k-bit flipped one-hot
  vector; the referee thresholds a chi-square-type statistic built from the
  per-symbol counts.  Private coin, k bits per player.
* ``hr_identity_test`` -- players are split across the Hadamard column sets
  and send one membership bit each; the referee runs an l2 mean test on the
  induced product-Bernoulli distribution.  Private coin, 1 bit per player.
* ``public_coin_identity_test`` -- groups of players hash their sample into
  a shared random subset and run a bias test on the resulting coin; the
  referee votes over groups.  Public coin, 1 bit per player.

Verdicts follow one fixed rule: accept iff statistic < threshold, with ties
rejecting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .channels import (
    RapporParams,
    hr_bit_channel,
    rappor_channel,
    rappor_params,
    rr_binary_channel,
    rr_debias,
    rr_shift,
)
from .dist import Distribution
from .hadamard import column_sets
from .rng import substream
from .smp import PublicSeed, partition_players

__all__ = [
    "TestVerdict",
    "IdentityGapMode",
    "PUBLIC_ID_GAP_PROB",
    "public_vote_constants",
    "rappor_counts",
    "rappor_statistic",
    "rappor_threshold",
    "rappor_identity_test",
    "mean_stat_from_counts",
    "mean_test_l2",
    "hr_mean_reference",
    "hr_threshold",
    "hr_identity_test",
    "binary_bias_test",
    "random_subset",
    "public_coin_identity_test",
    "amplify",
]

# Worst-case probability that a uniformly random subset witnesses a far pair;
# the conservative one of the two constants stated for the subset theorem.
PUBLIC_ID_GAP_PROB = 1.0 / 288.0


@dataclass(frozen=True)
class TestVerdict:
    """Outcome of a tester: accept iff statistic < threshold (ties reject)."""

    accept: bool
    statistic: float
    threshold: float
    n_used: int


def _verdict(statistic: float, threshold: float, n_used: int) -> TestVerdict:
    return TestVerdict(
        accept=bool(statistic < threshold),
        statistic=float(statistic),
        threshold=float(threshold),
        n_used=int(n_used),
    )


@dataclass(frozen=True)
class IdentityGapMode:
    """What the tester must distinguish.

    ``tv`` mode: p = q versus TV(p, q) > eps.
    ``l2`` mode: ||p - q||_2^2 <= low versus >= high (low < high); used by the
    independence tester, where the reference is itself estimated.
    """

    kind: str
    eps: Optional[float] = None
    l2_low: Optional[float] = None
    l2_high: Optional[float] = None

    def __post_init__(self):
        if self.kind == "tv":
            if self.eps is None or not 0 < self.eps < 1:
                raise ValueError("tv mode needs eps in (0, 1)")
        elif self.kind == "l2":
            if self.l2_low is None or self.l2_high is None or not self.l2_low < self.l2_high:
                raise ValueError("l2 mode needs bounds with low < high")
        else:
            raise ValueError(f"unknown gap mode {self.kind!r}")

    @classmethod
    def tv(cls, eps: float) -> "IdentityGapMode":
        return cls(kind="tv", eps=eps)

    @classmethod
    def l2(cls, low: float, high: float) -> "IdentityGapMode":
        return cls(kind="l2", l2_low=low, l2_high=high)


def public_vote_constants(c: float) -> tuple[float, float]:
    """(delta0, tau margin) of the repeated-subgroup vote with witness rate c.

    A single subgroup test is run at failure budget delta0 = c / (2(1+c));
    the referee accepts iff the rejecting fraction stays below delta0 + c/4.
    """
    delta0 = c / (2.0 * (1.0 + c))
    return delta0, delta0 + c / 4.0


# ---------------------------------------------------------------------------
# RAPPOR chi-square tester
# ---------------------------------------------------------------------------


def rappor_counts(messages) -> np.ndarray:
    """Per-symbol counts N_x = #{players whose message has bit x set}."""
    bits = np.asarray(messages, dtype=np.int64)
    if bits.ndim != 2:
        raise ValueError("messages must form an n-by-k bit matrix")
    return bits.sum(axis=0)


def rappor_statistic(N, n: int, q: Distribution, params: RapporParams) -> float:
    """Chi-square-type statistic with expectation n(n-1) alpha^2 ||p - q||_2^2.

    With lam_x = alpha*q(x) + beta, sums (N_x - (n-1) lam_x)^2 - N_x
    + (n-1) lam_x^2 over the domain; the subtracted linear term cancels the
    variance the quadratic would otherwise pick up from Binomial noise.
    """
    N = np.asarray(N, dtype=np.float64)
    lam = params.alpha * q.mass + params.beta
    terms = (N - (n - 1) * lam) ** 2 - N + (n - 1) * lam**2
    return float(terms.sum())


def rappor_threshold(n: int, k: int, eps: float, params: RapporParams) -> float:
    """Acceptance threshold n(n-1) alpha^2 eps^2 / k."""
    return n * (n - 1) * params.alpha**2 * eps**2 / k


def rappor_identity_test(
    samples, q: Distribution, eps: float, rho: float, master_seed: int
) -> TestVerdict:
    """Identity test from flipped one-hot messages; accepts iff T < n(n-1)a^2 eps^2/k."""
    samples = np.asarray(samples, dtype=np.int64)
    n = samples.shape[0]
    if n < 2:
        raise ValueError("need at least 2 players")
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    channel = rappor_channel(q.k, rho)
    bits = channel.sample(samples, substream(master_seed, "rappor-id"))
    params = rappor_params(rho)
    stat = rappor_statistic(rappor_counts(bits), n, q, params)
    return _verdict(stat, rappor_threshold(n, q.k, eps, params), n)


# ---------------------------------------------------------------------------
# Hadamard-response tester (l2 mean test on one-bit messages)
# ---------------------------------------------------------------------------


def mean_stat_from_counts(ones, m: int, mu_ref) -> float:
    """Unbiased U-statistic for ||mu - mu_ref||_2^2 from per-coordinate one-counts.

    For bits B_{ij} (i < m samples, j coordinates) with S_j ones in
    coordinate j,

        E = (1/(m(m-1))) sum_j [ (S_j - m mu_j)^2 - S_j (1-mu_j)^2 - (m-S_j) mu_j^2 ],

    which is the pairwise form sum_{i != i'} (B_ij - mu_j)(B_i'j - mu_j)
    collapsed to counts.
    """
    if m < 2:
        raise ValueError("need at least 2 rows")
    S = np.asarray(ones, dtype=np.float64)
    mu = np.asarray(mu_ref, dtype=np.float64)
    centered_sq = (S - m * mu) ** 2
    diag = S * (1.0 - mu) ** 2 + (m - S) * mu**2
    return float((centered_sq - diag).sum() / (m * (m - 1)))


def mean_test_l2(bit_matrix, mu_ref, threshold: float) -> TestVerdict:
    """Accept iff the U-statistic for ||mu - mu_ref||_2^2 stays below threshold."""
    bits = np.asarray(bit_matrix, dtype=np.int64)
    if bits.ndim != 2 or bits.shape[0] < 2:
        raise ValueError("need an m-by-K bit matrix with m >= 2")
    m = bits.shape[0]
    stat = mean_stat_from_counts(bits.sum(axis=0), m, mu_ref)
    return _verdict(stat, threshold, m * bits.shape[1])


def hr_mean_reference(q: Distribution, rho: float, spec=None) -> np.ndarray:
    """Per-column reference means ((e^rho-1)/(e^rho+1)) q(C_j) + 1/(e^rho+1)."""
    if spec is None:
        spec = column_sets(q.k)
    return rr_shift(spec.set_masses(q), rho)


def _hr_gap_scale(rho: float) -> float:
    """g with ||mu(p) - mu(q)||_2 = g sqrt(K) ||p - q||_2: g = (e^rho-1)/(2(e^rho+1))."""
    e = math.exp(rho)
    return (e - 1.0) / (2.0 * (e + 1.0))


def hr_threshold(k: int, K: int, gap: IdentityGapMode, rho: float) -> float:
    """Mean-space acceptance threshold for the Hadamard-response tester.

    The membership bits scale squared l2 distance by g^2 K; in tv mode the
    far side is at least 4 eps^2/k away, so the cut sits at the midpoint
    2 eps^2/k; in l2 mode it sits at the midpoint of the stated gap.
    """
    g2K = _hr_gap_scale(rho) ** 2 * K
    if gap.kind == "tv":
        return g2K * 2.0 * gap.eps**2 / k
    return g2K * 0.5 * (gap.l2_low + gap.l2_high)


def hr_identity_test(
    samples, q: Distribution, gap: IdentityGapMode, rho: float, master_seed: int
) -> TestVerdict:
    """One-bit identity test: membership bits for the Hadamard column sets.

    Players are split into K equal contiguous groups (the surplus is dropped);
    group j reports randomized membership of its sample in C_j, giving the
    referee m = floor(n/K) product-Bernoulli rows to feed the l2 mean test.
    """
    samples = np.asarray(samples, dtype=np.int64)
    n = samples.shape[0]
    spec = column_sets(q.k)
    K = spec.K
    if n < K:
        raise ValueError(f"need at least K={K} players, got {n}")
    assignment, _ = partition_players(n, K)
    m = n // K
    rng = substream(master_seed, "hr-id")
    ones = np.empty(K, dtype=np.int64)
    for j in range(K):
        group = samples[assignment == j]
        bits = hr_bit_channel(spec.sets[j], rho, q.k).sample(group, rng)
        ones[j] = int(bits.sum())
    stat = mean_stat_from_counts(ones, m, hr_mean_reference(q, rho, spec))
    return _verdict(stat, hr_threshold(q.k, K, gap, rho), m * K)


# ---------------------------------------------------------------------------
# Public-coin tester (random subsets + bias tests)
# ---------------------------------------------------------------------------


def binary_bias_test(
    bits, q_bias: float, eps_prime: float, rho: float, delta0: float | None = None
) -> TestVerdict:
    """Bias test on randomized-response bits: accept iff |estimate - q_bias| < eps'/2.

    ``bits`` must already be privatized by binary randomized response at level
    rho; the empirical mean is debiased before comparing.  The error is at
    most delta0 once the group is large enough for the noise at this (rho,
    eps') -- delta0 itself does not enter the verdict.
    """
    bits = np.asarray(bits)
    if bits.size == 0:
        raise ValueError("need at least one bit")
    estimate = rr_debias(float(bits.mean()), rho)
    return _verdict(abs(estimate - q_bias), eps_prime / 2.0, bits.size)


def random_subset(k: int, rng: np.random.Generator) -> np.ndarray:
    """A uniformly random subset of [k], as a sorted array of 1-based elements."""
    return np.flatnonzero(rng.random(k) < 0.5) + 1


def public_coin_identity_test(
    samples,
    q: Distribution,
    eps: float,
    rho: float,
    public_seed: PublicSeed,
    master_seed: int,
    T_reps: int = 200,
) -> TestVerdict:
    """Identity test from shared random subsets.

    The players are split into T_reps groups.  Group t hashes its samples
    through a shared uniformly random subset S_t and runs the bias test of
    p(S_t) against q(S_t) at distance eps' = eps/sqrt(2k).  A far p perturbs
    the subset bias with probability at least 1/288 over S_t, so the referee
    accepts only when almost every group accepted.
    """
    samples = np.asarray(samples, dtype=np.int64)
    n = samples.shape[0]
    if T_reps < 1 or n < T_reps:
        raise ValueError(f"cannot split {n} players into {T_reps} groups")
    k = q.k
    m = n // T_reps
    eps_prime = eps / math.sqrt(2.0 * k)
    delta0, tau_margin = public_vote_constants(PUBLIC_ID_GAP_PROB)
    shared = public_seed.stream("subsets")
    rng = substream(master_seed, "public-id")
    channel = rr_binary_channel(rho)
    accepts = 0
    for t in range(T_reps):
        subset = random_subset(k, shared)
        member = np.zeros(k + 1, dtype=np.int64)
        member[subset] = 1
        group = samples[t * m : (t + 1) * m]
        bits = channel.sample(member[group], rng)
        sub = binary_bias_test(bits, subset_bias(q, subset), eps_prime, rho, delta0)
        accepts += int(sub.accept)
    reject_fraction = 1.0 - accepts / T_reps
    return _verdict(reject_fraction, tau_margin, m * T_reps)


def subset_bias(q: Distribution, subset: np.ndarray) -> float:
    """q(S) for a subset of 1-based domain elements."""
    if subset.size == 0:
        return 0.0
    return float(q.mass[subset - 1].sum())


# ---------------------------------------------------------------------------
# Error amplification
# ---------------------------------------------------------------------------


def amplify(run_repetition: Callable[[int], TestVerdict], delta: float) -> TestVerdict:
    """Majority vote over ceil(18 ln(1/delta)) independent repetitions.

    Drives a base tester with two-sided error <= 1/3 down to error <= delta;
    ``run_repetition`` receives the repetition index and must use disjoint
    players per index.
    """
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    reps = math.ceil(18.0 * math.log(1.0 / delta))
    verdicts = [run_repetition(r) for r in range(reps)]
    reject_fraction = sum(not v.accept for v in verdicts) / reps
    return _verdict(reject_fraction, 0.5, sum(v.n_used for v in verdicts))
