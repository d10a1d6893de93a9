"""Locally private independence testers for joint distributions over [k] x [k].

Decide whether the players' pairs follow a product distribution or a joint
that is far in total variation from every product distribution.

* ``private_coin_independence_test`` -- learn-then-test: half the players
  estimate both marginals through one-bit Hadamard-response frequency
  estimation; the other half run the one-bit identity tester over the
  flattened domain [k^2] against the learned product, in l2-gap mode.  Only
  the referee ever needs the learned reference.
* ``public_coin_independence_test`` -- per repetition, two shared random
  subsets S1, S2 collapse the joint to a 2x2 table whose independence is
  checked from three privatized indicator bits; a far joint perturbs the
  product cell with probability at least 1/4096 over (S1, S2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channels import rr_binary_channel, rr_debias
from .dist import Distribution, JointDistribution, product
from .hadamard import column_sets, sylvester
from .identity import IdentityGapMode, TestVerdict, _verdict, hr_identity_test, public_vote_constants, random_subset
from .rng import substream
from .smp import PublicSeed, partition_players

__all__ = [
    "PUBLIC_INDEP_GAP_PROB",
    "LearnedProduct",
    "invert_column_masses",
    "hr_frequency_estimate",
    "private_coin_independence_test",
    "binary_independence_test",
    "public_coin_independence_test",
]

# Worst-case probability that a pair of uniformly random subsets witnesses a
# joint that is far from the product of its marginals.
PUBLIC_INDEP_GAP_PROB = 1.0 / 4096.0


@dataclass(frozen=True)
class LearnedProduct:
    """Marginal estimates and the l2 budget their product is trusted to."""

    p1_hat: Distribution
    p2_hat: Distribution
    l2_error_budget: float

    def joint(self) -> JointDistribution:
        return product(self.p1_hat, self.p2_hat)


def invert_column_masses(set_masses, k: int, spec=None) -> Distribution:
    """Recover a distribution over [k] from its Hadamard column-set masses.

    The masses satisfy m = (H p_K + 1)/2 for the zero-padded p_K, so
    p_K = H^T (2m - 1) / K.  Estimated masses can produce slightly negative
    or unnormalised entries; the result is clipped to >= 0 on [k] and
    renormalised (uniform if everything clips to zero).
    """
    if spec is None:
        spec = column_sets(k)
    h = sylvester(spec.K)
    m = np.asarray(set_masses, dtype=np.float64)
    p_padded = (h.T @ (2.0 * m - 1.0)) / spec.K
    p = np.clip(p_padded[:k], 0.0, None)
    total = p.sum()
    if total <= 0.0:
        return Distribution(np.full(k, 1.0 / k))
    return Distribution(p / total)


def hr_frequency_estimate(samples, k: int, rho: float, master_seed: int) -> Distribution:
    """One-bit-per-player frequency estimate over [k].

    Players are split across the K Hadamard column sets; group j's randomized
    membership bits estimate p(C_j) after debiasing, and the column-mass
    system is inverted to recover p.  The expected squared l2 error decays
    like k/(n * rho^2).
    """
    samples = np.asarray(samples, dtype=np.int64)
    n = samples.shape[0]
    spec = column_sets(k)
    if n < spec.K:
        raise ValueError(f"need at least K={spec.K} players, got {n}")
    assignment, _ = partition_players(n, spec.K)
    rng = substream(master_seed, "hr-learn")
    masses = np.empty(spec.K)
    for j in range(spec.K):
        group = samples[assignment == j]
        member = np.isin(group, spec.sets[j]).astype(np.int64)
        bits = rr_binary_channel(rho).sample(member, rng)
        masses[j] = rr_debias(float(bits.mean()), rho)
    return invert_column_masses(masses, k, spec)


def private_coin_independence_test(
    pair_samples, k: int, eps: float, rho: float, master_seed: int
) -> TestVerdict:
    """Learn-then-test independence over [k] x [k] (private coin, one bit each).

    The first half of the players learns the marginals (a quarter each); the
    second half tests the flattened joint against the learned product,
    distinguishing squared l2 distance <= eps^2/(2 k^2) from >= 2 eps^2/k^2.
    """
    pairs = np.asarray(pair_samples, dtype=np.int64)
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise ValueError("pair_samples must be an (n, 2) array")
    n = pairs.shape[0]
    quarter = n // 4
    if quarter < 1:
        raise ValueError("too few players to split into learning and testing halves")
    p1_hat = hr_frequency_estimate(pairs[:quarter, 0], k, rho, substream_seed(master_seed, 1))
    p2_hat = hr_frequency_estimate(pairs[quarter : 2 * quarter, 1], k, rho, substream_seed(master_seed, 2))
    learned = LearnedProduct(p1_hat, p2_hat, l2_error_budget=eps**2 / (2.0 * k**2))
    reference = learned.joint().flattened()
    test_pairs = pairs[2 * quarter :]
    flat = (test_pairs[:, 0] - 1) * k + test_pairs[:, 1]
    gap = IdentityGapMode.l2(eps**2 / (2.0 * k**2), 2.0 * eps**2 / k**2)
    verdict = hr_identity_test(flat, reference, gap, rho, substream_seed(master_seed, 3))
    return _verdict(verdict.statistic, verdict.threshold, 2 * quarter + verdict.n_used)


def substream_seed(master_seed: int, index: int) -> int:
    """A derived integer seed, for passing into components that take seeds."""
    return int(substream(master_seed, "derive", index).integers(0, 2**63))


def _product_deviation_verdict(bits_a, bits_b, bits_c, eps_prime: float, rho: float) -> TestVerdict:
    """Accept iff |a_hat - b_hat * c_hat| < eps'/4 for three debiased bit means."""
    a = rr_debias(float(np.asarray(bits_a).mean()), rho)
    b = rr_debias(float(np.asarray(bits_b).mean()), rho)
    c = rr_debias(float(np.asarray(bits_c).mean()), rho)
    n_used = sum(np.asarray(x).size for x in (bits_a, bits_b, bits_c))
    return _verdict(abs(a - b * c), eps_prime / 4.0, n_used)


def binary_independence_test(
    pair_bits, eps: float, rho: float, delta: float | None = None, master_seed: int = 0
) -> TestVerdict:
    """Independence test over {0,1} x {0,1}.

    Splits the players into thirds estimating p(0,0), p1(0) and p2(0) through
    randomized response on the indicators 1{(X,Y)=(0,0)}, 1{X=0}, 1{Y=0}, and
    accepts iff |p00 - p1*p2| < eps/4.  Valid because every cell of a 2x2
    table deviates from the product of the marginals by the same amount, so a
    joint eps-far from independent has |p(0,0) - p1(0) p2(0)| >= eps/2.
    """
    pairs = np.asarray(pair_bits, dtype=np.int64)
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise ValueError("pair_bits must be an (n, 2) array of bits")
    n = pairs.shape[0]
    if n < 3:
        raise ValueError("need at least 3 players")
    third = n // 3
    a, b, c = pairs[:third], pairs[third : 2 * third], pairs[2 * third : 3 * third]
    rng = substream(master_seed, "binary-indep")
    channel = rr_binary_channel(rho)
    bits_a = channel.sample(((a[:, 0] == 0) & (a[:, 1] == 0)).astype(np.int64), rng)
    bits_b = channel.sample((b[:, 0] == 0).astype(np.int64), rng)
    bits_c = channel.sample((c[:, 1] == 0).astype(np.int64), rng)
    return _product_deviation_verdict(bits_a, bits_b, bits_c, eps, rho)


def public_coin_independence_test(
    pair_samples,
    k: int,
    eps: float,
    rho: float,
    public_seed: PublicSeed,
    master_seed: int,
    T_reps: int = 200,
) -> TestVerdict:
    """Independence test from shared random subset pairs (one bit per player).

    Per repetition t the shared stream draws independent uniform subsets
    S1, S2 of [k]; three player groups report randomized indicators of
    (X,Y) in S1 x S2, X in S1, and Y in S2, and the 2x2 product check runs at
    distance eps' = eps/sqrt(8k).  The referee accepts iff the rejecting
    fraction of repetitions stays below delta0 + c/4 with c = 1/4096.
    """
    pairs = np.asarray(pair_samples, dtype=np.int64)
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise ValueError("pair_samples must be an (n, 2) array")
    n = pairs.shape[0]
    groups = 3 * T_reps
    if T_reps < 1 or n < groups:
        raise ValueError(f"cannot split {n} players into {groups} groups")
    m = n // groups
    eps_prime = eps / math.sqrt(8.0 * k)
    delta0, tau_margin = public_vote_constants(PUBLIC_INDEP_GAP_PROB)
    shared = public_seed.stream("subset-pairs")
    rng = substream(master_seed, "public-indep")
    channel = rr_binary_channel(rho)
    accepts = 0
    for t in range(T_reps):
        s1 = random_subset(k, shared)
        s2 = random_subset(k, shared)
        in1 = np.zeros(k + 1, dtype=bool)
        in1[s1] = True
        in2 = np.zeros(k + 1, dtype=bool)
        in2[s2] = True
        block = pairs[3 * t * m : 3 * (t + 1) * m]
        a, b, c = block[:m], block[m : 2 * m], block[2 * m :]
        bits_a = channel.sample((in1[a[:, 0]] & in2[a[:, 1]]).astype(np.int64), rng)
        bits_b = channel.sample(in1[b[:, 0]].astype(np.int64), rng)
        bits_c = channel.sample(in2[c[:, 1]].astype(np.int64), rng)
        sub = _product_deviation_verdict(bits_a, bits_b, bits_c, eps_prime, rho)
        accepts += int(sub.accept)
    reject_fraction = 1.0 - accepts / T_reps
    return _verdict(reject_fraction, tau_margin, m * groups)
