"""Brute-force oracles: exact, enumeration-based versions of every quantity
the testers rely on, at desk scale.

Nothing here is meant to be fast.  Each function recomputes a claim from
first principles (exhaustive enumeration over input tuples, message tuples,
subsets, or sign families) so the closed forms and thresholds used by the
testers can be checked against something that cannot share their bugs.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy import optimize

from .channels import RapporParams, rappor_params
from .dist import Distribution, JointDistribution, marginals, product, tv_distance
from .identity import rappor_statistic

__all__ = [
    "rappor_message_distribution",
    "rappor_statistic_moments_exact",
    "rappor_statistic_mean_formula",
    "rappor_statistic_var_bound",
    "rappor_bit_pair_prob_exact",
    "rappor_bit_pair_prob_formula",
    "all_subsets_matrix",
    "subset_deviations",
    "product_subset_deviations",
    "deviation_matrix",
    "z_moments_exact",
    "z_moments_fourwise",
    "tv_to_nearest_product",
    "product_distance_bracket",
]


# ---------------------------------------------------------------------------
# Exact RAPPOR statistics by enumeration
# ---------------------------------------------------------------------------


def rappor_message_distribution(k: int, rho: float, flip: float | None = None) -> np.ndarray:
    """k x 2^k matrix W[x-1, m] = P(message m | input x), messages bit-coded.

    ``flip`` overrides the mechanism's flip probability (used by negative
    controls that corrupt the channel while leaving the statistic alone).
    """
    f = rappor_params(rho).flip if flip is None else flip
    codes = np.arange(2**k, dtype=np.int64)
    bits = (codes[:, None] >> np.arange(k)[None, :]) & 1
    w = np.empty((k, 2**k))
    for x in range(k):
        onehot = np.zeros(k, dtype=np.int64)
        onehot[x] = 1
        flips = (bits != onehot).sum(axis=1)
        w[x] = f**flips * (1.0 - f) ** (k - flips)
    return w


def rappor_statistic_moments_exact(
    p: Distribution,
    q: Distribution,
    rho: float,
    n: int,
    flip: float | None = None,
    params: RapporParams | None = None,
) -> tuple[float, float]:
    """Exact (mean, variance) of the chi-square-type statistic.

    Enumerates every input tuple in [k]^n and every message tuple in
    (2^k)^n; infeasible beyond k, n of about 3 or 4, which is the point.
    """
    k = p.k
    if k**n * (2**k) ** n > 2_000_000:
        raise ValueError("enumeration too large; shrink k or n")
    par = params if params is not None else rappor_params(rho)
    w = rappor_message_distribution(k, rho, flip)
    codes = np.arange(2**k, dtype=np.int64)
    bits = ((codes[:, None] >> np.arange(k)[None, :]) & 1).astype(np.int64)
    mean = 0.0
    second = 0.0
    for xs in itertools.product(range(k), repeat=n):
        p_inputs = float(np.prod([p.mass[x] for x in xs]))
        if p_inputs == 0.0:
            continue
        for ms in itertools.product(range(2**k), repeat=n):
            prob = p_inputs
            for x, m in zip(xs, ms):
                prob *= w[x, m]
            if prob == 0.0:
                continue
            counts = bits[list(ms)].sum(axis=0)
            t = rappor_statistic(counts, n, q, par)
            mean += prob * t
            second += prob * t * t
    return mean, second - mean**2


def rappor_statistic_mean_formula(p: Distribution, q: Distribution, params: RapporParams, n: int) -> float:
    """Closed form E[T] = n(n-1) alpha^2 ||p - q||_2^2."""
    d = p.mass - q.mass
    return n * (n - 1) * params.alpha**2 * float(d @ d)


def rappor_statistic_var_bound(
    p: Distribution, q: Distribution, params: RapporParams, n: int
) -> float:
    """Upper bound Var[T] <= 2 k n^2 + 5 n^3 alpha^2 ||p - q||_2^2."""
    d = p.mass - q.mass
    return 2.0 * p.k * n**2 + 5.0 * n**3 * params.alpha**2 * float(d @ d)


def rappor_bit_pair_prob_exact(
    p: Distribution, rho: float, x: int, y: int, same_player: bool
) -> float:
    """P(Y_{ix} = 1, Y_{jy} = 1) by conditioning on the players' inputs.

    ``x``, ``y`` are 1-based coordinates; ``same_player`` selects i = j.
    Within one player the bits are conditionally independent given the input;
    across players everything is independent.
    """
    par = rappor_params(rho)

    def bit_prob(coord: int, value: int) -> float:
        return 1.0 - par.flip if value == coord else par.flip

    if same_player:
        total = 0.0
        for u in range(1, p.k + 1):
            total += p.mass[u - 1] * bit_prob(x, u) * (1.0 if x == y else bit_prob(y, u))
        return total
    px = sum(p.mass[u - 1] * bit_prob(x, u) for u in range(1, p.k + 1))
    py = sum(p.mass[u - 1] * bit_prob(y, u) for u in range(1, p.k + 1))
    return px * py


def rappor_bit_pair_prob_formula(
    p: Distribution, params: RapporParams, x: int, y: int, same_player: bool
) -> float:
    """The three-case closed form for P(Y_{ix} = 1, Y_{jy} = 1)."""
    mx = params.alpha * p.mass[x - 1] + params.beta
    my = params.alpha * p.mass[y - 1] + params.beta
    if not same_player:
        return mx * my
    if x != y:
        return mx * my - params.alpha**2 * float(p.mass[x - 1] * p.mass[y - 1])
    return mx


# ---------------------------------------------------------------------------
# Exhaustive subset enumeration
# ---------------------------------------------------------------------------


def all_subsets_matrix(k: int) -> np.ndarray:
    """2^k x k 0/1 matrix whose rows are the indicator vectors of all subsets."""
    if k > 20:
        raise ValueError("subset enumeration beyond k = 20 is not reasonable")
    codes = np.arange(2**k, dtype=np.int64)
    return ((codes[:, None] >> np.arange(k)[None, :]) & 1).astype(np.float64)


def subset_deviations(p: Distribution, q: Distribution) -> np.ndarray:
    """p(S) - q(S) for every subset S of [k], indexed by bitmask."""
    return all_subsets_matrix(p.k) @ (p.mass - q.mass)


def deviation_matrix(joint: JointDistribution) -> np.ndarray:
    """delta[i, j] = p(i, j) - p1(i) p2(j); every row and column sums to zero."""
    p1, p2 = marginals(joint)
    return joint.mass - np.outer(p1.mass, p2.mass)


def product_subset_deviations(joint: JointDistribution) -> np.ndarray:
    """Z[S1, S2] = p(S1 x S2) - p1(S1) p2(S2) for all subset pairs (bitmask-indexed)."""
    delta = deviation_matrix(joint)
    ind1 = all_subsets_matrix(joint.k1)
    ind2 = all_subsets_matrix(joint.k2)
    return ind1 @ delta @ ind2.T


def z_moments_exact(delta: np.ndarray) -> tuple[float, float, float]:
    """Exact (E[Z], E[Z^2], E[Z^4]) for Z = sum delta_ij X_i Y_j, X, Y uniform bits."""
    k1, k2 = delta.shape
    ind1 = all_subsets_matrix(k1)
    ind2 = all_subsets_matrix(k2)
    z = ind1 @ delta @ ind2.T
    flat = z.reshape(-1)
    return float(flat.mean()), float((flat**2).mean()), float((flat**4).mean())


# --- 4-wise independent bit vectors from cubic polynomials over GF(8) -------

_GF8_POLY = 0b1011  # x^3 + x + 1


def _gf8_mul(a: int, b: int) -> int:
    out = 0
    while b:
        if b & 1:
            out ^= a
        b >>= 1
        a <<= 1
        if a & 0b1000:
            a ^= _GF8_POLY
    return out


def _fourwise_bit_family(k: int) -> np.ndarray:
    """All 4096 evaluations of cubic polynomials over GF(8), reduced to bits.

    Rows are the vectors (lsb(poly(t)))_{t in first k field points}; distinct
    points of a random degree-<4 polynomial are uniform and 4-wise
    independent, and the low bit is a balanced map to {0, 1}.
    """
    if not 1 <= k <= 8:
        raise ValueError("the GF(8) family serves domains up to k = 8")
    points = list(range(k))
    powers = [[_gf8_mul(t, _gf8_mul(t, t)), _gf8_mul(t, t), t, 1] for t in points]
    fam = np.empty((8**4, k), dtype=np.float64)
    row = 0
    for a in range(8):
        for b in range(8):
            for c in range(8):
                for d in range(8):
                    coeffs = (a, b, c, d)
                    for col, pw in enumerate(powers):
                        acc = 0
                        for cf, basis in zip(coeffs, pw):
                            acc ^= _gf8_mul(cf, basis)
                        fam[row, col] = acc & 1
                    row += 1
    return fam


def z_moments_fourwise(delta: np.ndarray) -> tuple[float, float, float]:
    """(E[Z], E[Z^2], E[Z^4]) when X and Y are only 4-wise independent.

    X and Y range independently over the cubic-polynomial bit family; moments
    up to order four must agree with the fully independent case.
    """
    k1, k2 = delta.shape
    fam1 = _fourwise_bit_family(k1)
    fam2 = _fourwise_bit_family(k2)
    left = fam1 @ delta  # (4096, k2)
    m1 = m2 = m4 = 0.0
    chunk = 512
    for start in range(0, fam2.shape[0], chunk):
        z = left @ fam2[start : start + chunk].T
        m1 += float(z.sum())
        m2 += float((z**2).sum())
        m4 += float((z**4).sum())
    total = fam1.shape[0] * fam2.shape[0]
    return m1 / total, m2 / total, m4 / total


# ---------------------------------------------------------------------------
# Distance to the nearest product distribution
# ---------------------------------------------------------------------------


def product_distance_bracket(joint: JointDistribution) -> tuple[float, float]:
    """(lower, upper) bounds on inf over products q1 x q2 of TV(joint, q1 x q2).

    The product of the joint's own marginals is within a factor 3 of optimal,
    giving the bracket [TV(joint, p1 x p2)/3, TV(joint, p1 x p2)].
    """
    p1, p2 = marginals(joint)
    d = tv_distance(joint.flattened(), product(p1, p2).flattened())
    return d / 3.0, d


def tv_to_nearest_product(
    joint: JointDistribution, rng: np.random.Generator, n_restarts: int = 40
) -> float:
    """Numerical upper bound on the TV distance to the nearest product.

    Random softmax restarts followed by Nelder-Mead polish; TV is piecewise
    linear in the marginals so gradient-free local search is appropriate.
    The true infimum is sandwiched between ``product_distance_bracket`` lower
    bound and this value.
    """
    k1, k2 = joint.k1, joint.k2
    target = joint.mass

    def tv_of(theta: np.ndarray) -> float:
        w1 = np.exp(theta[:k1] - theta[:k1].max())
        w2 = np.exp(theta[k1:] - theta[k1:].max())
        q = np.outer(w1 / w1.sum(), w2 / w2.sum())
        return 0.5 * float(np.abs(target - q).sum())

    p1, p2 = marginals(joint)
    best = tv_of(np.concatenate([np.log(p1.mass + 1e-12), np.log(p2.mass + 1e-12)]))
    for _ in range(n_restarts):
        theta0 = rng.normal(size=k1 + k2)
        res = optimize.minimize(tv_of, theta0, method="Nelder-Mead", options={"maxiter": 2000, "xatol": 1e-6, "fatol": 1e-12})
        best = min(best, float(res.fun))
    return best
