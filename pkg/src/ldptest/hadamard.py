"""Sylvester Hadamard matrices and their column sets.

For a source domain [k] we use the K x K Sylvester matrix with
K = 2^ceil(log2(k+1)), the smallest power of two strictly larger than k
(hence k < K <= 2k).  Column j induces the set C_j of rows carrying +1;
C_1 is all of [K] and every other column set has exactly K/2 elements.

The column sets satisfy a Parseval-type identity: for distributions p, q
over [k] (zero-padded to [K]),

    sum_{j=1..K} (p(C_j) - q(C_j))^2 = (K/4) * ||p - q||_2^2,

because the Hadamard matrix is a scaled isometry (H^T H = K I).  The sum
runs over all K columns; the j = 1 term is always zero since p(C_1) = 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .dist import Distribution

__all__ = ["sylvester", "HadamardSpec", "column_sets", "subset_mass", "hadamard_order"]


@lru_cache(maxsize=None)
def sylvester(order: int) -> np.ndarray:
    """The Sylvester Hadamard matrix of the given power-of-two order.

    Built by the doubling recursion H(2m) = [[H(m), H(m)], [H(m), -H(m)]]
    from H(1) = [1].  Entries are +/-1 int64, so H^T H = order * I holds in
    exact integer arithmetic.
    """
    if order < 1 or order & (order - 1) != 0:
        raise ValueError(f"order must be a power of two >= 1, got {order}")
    h = np.array([[1]], dtype=np.int64)
    while h.shape[0] < order:
        h = np.block([[h, h], [h, -h]])
    h = h.copy()
    h.setflags(write=False)
    return h


def hadamard_order(k: int) -> int:
    """Smallest power of two strictly larger than k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return 1 << int(np.ceil(np.log2(k + 1)))


@dataclass(frozen=True)
class HadamardSpec:
    """Column sets of the order-K Sylvester matrix serving a source domain [k].

    ``sets`` holds the K column sets as sorted 1-based row-index arrays.
    For K <= 64 the sets are additionally available as integer bitmasks
    (bit i-1 set iff row i is in the set), which makes intersection queries
    cheap in hot loops.
    """

    k: int
    K: int
    sets: tuple
    bitmasks: tuple | None

    def indicator_matrix(self) -> np.ndarray:
        """K x K 0/1 matrix M with M[i-1, j-1] = 1 iff row i is in C_j."""
        h = sylvester(self.K)
        return ((h + 1) // 2).astype(np.int64)

    def set_masses(self, p: Distribution) -> np.ndarray:
        """Vector of p(C_j) for j = 1..K, padding p with zeros above k.

        Computed as (H p_K + 1)/2, which is exact and O(K^2).
        """
        if p.k > self.K:
            raise ValueError(f"distribution domain {p.k} exceeds matrix order {self.K}")
        padded = np.zeros(self.K)
        padded[: p.k] = p.mass
        h = sylvester(self.K)
        return ((h.T @ padded) + 1.0) / 2.0


@lru_cache(maxsize=None)
def column_sets(k: int) -> HadamardSpec:
    """The Hadamard column-set family for source domain [k]."""
    K = hadamard_order(k)
    h = sylvester(K)
    sets = []
    masks = [] if K <= 64 else None
    for j in range(K):
        rows = np.flatnonzero(h[:, j] == 1) + 1
        rows.setflags(write=False)
        sets.append(rows)
        if masks is not None:
            mask = 0
            for i in rows:
                mask |= 1 << (int(i) - 1)
            masks.append(mask)
    return HadamardSpec(k=k, K=K, sets=tuple(sets), bitmasks=None if masks is None else tuple(masks))


def subset_mass(p: Distribution, C) -> float:
    """Probability that a draw from p lands in C, for C a set of 1-based indices.

    Indices above p's domain carry zero mass, so C may live in a padded
    domain [K] with K >= k.
    """
    idx = np.asarray(list(C) if isinstance(C, (set, frozenset)) else C, dtype=np.int64)
    if idx.size == 0:
        return 0.0
    if np.any(idx < 1):
        raise ValueError("subset indices must be >= 1")
    inside = idx[idx <= p.k]
    return float(p.mass[inside - 1].sum())
