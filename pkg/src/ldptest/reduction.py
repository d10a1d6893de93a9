"""Embedding distributions over [k^2] into joints over [2k] x [2k].

``block_lift`` spreads each consecutive pair of masses p(2i-1), p(2i) over
the eight cells of a dedicated 2-by-4 block, alternating checkerboard-style:

    1/4 * [ p(2i-1)  p(2i)    p(2i-1)  p(2i)
            p(2i)    p(2i-1)  p(2i)    p(2i-1) ]

The blocks tile the [2k] x [2k] grid exactly (2k rows of cells = 2 per block
row, ell = k/2 blocks per block row).  Because every mass is split into four
equal parts placed on disjoint cells, l1 distance -- hence total variation --
is preserved exactly; each block's row sums are (p(2i-1)+p(2i))/2 and column
sums (p(2i-1)+p(2i))/4, so inputs with constant pair sums (the uniform
distribution and its sign-pattern perturbations) map to joints with exactly
uniform marginals.

Combined with a sign-pattern perturbation at distance 3*eps from uniform,
this produces joints with uniform marginals that are at least eps-far from
every product distribution: a joint is never more than 3x closer to some
product than to the product of its own marginals, and here the latter is the
uniform joint at distance exactly 3*eps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .dist import Distribution, JointDistribution, SignPattern, paninski

__all__ = [
    "BlockLayout",
    "block_layout",
    "block_lift",
    "lift_sample",
    "lift_samples",
    "independence_hardness_instance",
]


@dataclass(frozen=True)
class BlockLayout:
    """Cell coordinates of the 2-by-4 blocks tiling [2k] x [2k].

    ``a_cells[i-1]`` / ``b_cells[i-1]`` are the four (row, col) pairs
    (1-based) receiving mass p(2i-1)/4 and p(2i)/4 respectively, for block
    index i in [k^2 / 2].
    """

    k: int
    ell: int
    a_cells: np.ndarray
    b_cells: np.ndarray

    @property
    def n_blocks(self) -> int:
        return 2 * self.ell**2

    @property
    def side(self) -> int:
        return 2 * self.k


@lru_cache(maxsize=None)
def block_layout(k: int) -> BlockLayout:
    """Block layout for even k >= 2; block i sits at block-row (i-1)//ell, block-col (i-1)%ell."""
    if k < 2 or k % 2 != 0:
        raise ValueError(f"k must be a positive even integer, got {k}")
    ell = k // 2
    n_blocks = 2 * ell**2
    a_cells = np.empty((n_blocks, 4, 2), dtype=np.int64)
    b_cells = np.empty((n_blocks, 4, 2), dtype=np.int64)
    for i in range(1, n_blocks + 1):
        r = (i - 1) // ell
        c = (i - 1) % ell
        top, left = 2 * r + 1, 4 * c + 1
        a_cells[i - 1] = [(top, left), (top, left + 2), (top + 1, left + 1), (top + 1, left + 3)]
        b_cells[i - 1] = [(top, left + 1), (top, left + 3), (top + 1, left), (top + 1, left + 2)]
    a_cells.setflags(write=False)
    b_cells.setflags(write=False)
    return BlockLayout(k=k, ell=ell, a_cells=a_cells, b_cells=b_cells)


def _layout_for_domain(domain_size: int) -> BlockLayout:
    k = math.isqrt(domain_size)
    if k * k != domain_size:
        raise ValueError(f"domain size {domain_size} is not a perfect square")
    return block_layout(k)


def block_lift(p: Distribution) -> JointDistribution:
    """Lift a distribution over [k^2] (k even) to a joint over [2k] x [2k]."""
    layout = _layout_for_domain(p.k)
    side = layout.side
    mass = np.zeros((side, side))
    for i in range(layout.n_blocks):
        a = layout.a_cells[i]
        b = layout.b_cells[i]
        mass[a[:, 0] - 1, a[:, 1] - 1] = p.mass[2 * i] / 4.0
        mass[b[:, 0] - 1, b[:, 1] - 1] = p.mass[2 * i + 1] / 4.0
    return JointDistribution(mass)


def lift_sample(x: int, k: int, rng: np.random.Generator) -> tuple[int, int]:
    """Convert one draw from p over [k^2] into a draw from its lifted joint.

    Returns one of the four cells carrying mass p(x)/4 in block ceil(x/2),
    chosen uniformly.
    """
    layout = block_layout(k)
    if not 1 <= x <= k * k:
        raise ValueError(f"element {x} outside domain [1, {k * k}]")
    block = (x + 1) // 2
    cells = layout.a_cells[block - 1] if x % 2 == 1 else layout.b_cells[block - 1]
    row, col = cells[rng.integers(0, 4)]
    return int(row), int(col)


def lift_samples(xs, k: int, rng: np.random.Generator) -> np.ndarray:
    """Vectorised ``lift_sample``: (n,) draws from [k^2] to (n, 2) joint draws."""
    layout = block_layout(k)
    xs = np.asarray(xs, dtype=np.int64)
    blocks = (xs + 1) // 2 - 1
    choice = rng.integers(0, 4, size=xs.shape[0])
    odd = xs % 2 == 1
    cells = np.where(odd[:, None], layout.a_cells[blocks, choice], layout.b_cells[blocks, choice])
    return cells


def independence_hardness_instance(k: int, eps: float, z: SignPattern) -> JointDistribution:
    """A joint over [2k] x [2k] with uniform marginals, eps-far from every product.

    Lifts the sign-pattern perturbation of uniform over [k^2] at distance
    gamma = 3*eps; requires 3*eps <= 1/2.
    """
    if not 0 < eps <= 1.0 / 6.0:
        raise ValueError(f"need 0 < eps <= 1/6 so that gamma = 3 eps <= 1/2, got {eps}")
    return block_lift(paninski(k * k, 3.0 * eps, z))
