"""Probability distributions over finite domains [k] = {1, ..., k}.

Mass functions are stored as float64 vectors (matrices for joint
distributions).  Constructors validate nonnegativity and renormalise only
when the input already sums to 1 within ``NORMALIZE_TOL``; anything further
off is rejected, since silent renormalisation tends to hide caller bugs.

Domain elements are 1-based throughout the library, matching the usual
[k] convention for discrete distributions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DomainMismatchError",
    "Distribution",
    "JointDistribution",
    "SignPattern",
    "uniform",
    "point_mass",
    "tv_distance",
    "l2_distance_sq",
    "product",
    "marginals",
    "sample",
    "paninski",
]

MASS_TOL = 1e-12
NORMALIZE_TOL = 1e-9


class DomainMismatchError(ValueError):
    """Two distributions that should share a domain do not."""


def _validated_mass(raw, ndim: int) -> np.ndarray:
    mass = np.asarray(raw, dtype=np.float64)
    if mass.ndim != ndim:
        raise ValueError(f"mass must be {ndim}-dimensional, got shape {mass.shape}")
    if mass.size == 0:
        raise ValueError("mass must be non-empty")
    if not np.all(np.isfinite(mass)):
        raise ValueError("mass entries must be finite")
    if np.any(mass < 0):
        raise ValueError(f"mass entries must be >= 0, min is {mass.min()}")
    total = float(mass.sum())
    if abs(total - 1.0) > NORMALIZE_TOL:
        raise ValueError(f"mass sums to {total!r}, more than {NORMALIZE_TOL} away from 1")
    mass = mass / total
    mass = mass.copy()
    mass.setflags(write=False)
    return mass


@dataclass(frozen=True)
class Distribution:
    """A probability mass function over [k]."""

    mass: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mass", _validated_mass(self.mass, 1))

    @property
    def k(self) -> int:
        return self.mass.shape[0]

    def __getitem__(self, x: int) -> float:
        """Mass of the 1-based domain element x."""
        if not 1 <= x <= self.k:
            raise IndexError(f"element {x} outside domain [1, {self.k}]")
        return float(self.mass[x - 1])


@dataclass(frozen=True)
class JointDistribution:
    """A probability mass function over [k1] x [k2], stored as a k1-by-k2 matrix."""

    mass: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mass", _validated_mass(self.mass, 2))

    @property
    def k1(self) -> int:
        return self.mass.shape[0]

    @property
    def k2(self) -> int:
        return self.mass.shape[1]

    def flattened(self) -> Distribution:
        """The same distribution over [k1*k2], row-major: (x, y) -> (x-1)*k2 + y."""
        return Distribution(self.mass.reshape(-1))


@dataclass(frozen=True)
class SignPattern:
    """A vector of +/-1 signs indexing a perturbation of consecutive pairs.

    A pattern of length m perturbs a (necessarily even) domain of size 2m.
    """

    bits: np.ndarray

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=np.int64)
        if bits.ndim != 1 or bits.size == 0:
            raise ValueError("sign pattern must be a non-empty vector")
        if not np.all(np.abs(bits) == 1):
            raise ValueError("sign pattern entries must be +1 or -1")
        bits = bits.copy()
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @property
    def domain_size(self) -> int:
        return 2 * self.bits.shape[0]

    @classmethod
    def random(cls, half_domain: int, rng: np.random.Generator) -> "SignPattern":
        return cls(rng.choice((-1, 1), size=half_domain))


def uniform(k: int) -> Distribution:
    return Distribution(np.full(k, 1.0 / k))


def point_mass(k: int, x: int) -> Distribution:
    mass = np.zeros(k)
    mass[x - 1] = 1.0
    return Distribution(mass)


def _check_same_domain(p: Distribution, q: Distribution):
    if p.k != q.k:
        raise DomainMismatchError(f"domain sizes differ: {p.k} vs {q.k}")


def tv_distance(p: Distribution, q: Distribution) -> float:
    """Total variation distance, i.e. half the l1 distance of the mass vectors."""
    _check_same_domain(p, q)
    return 0.5 * float(np.abs(p.mass - q.mass).sum())


def l2_distance_sq(p: Distribution, q: Distribution) -> float:
    """Squared l2 distance of the mass vectors."""
    _check_same_domain(p, q)
    d = p.mass - q.mass
    return float(d @ d)


def product(p1: Distribution, p2: Distribution) -> JointDistribution:
    """The product distribution (p1 x p2)(x1, x2) = p1(x1) * p2(x2)."""
    return JointDistribution(np.outer(p1.mass, p2.mass))


def marginals(joint: JointDistribution) -> tuple[Distribution, Distribution]:
    """Row and column marginals of a joint distribution."""
    return Distribution(joint.mass.sum(axis=1)), Distribution(joint.mass.sum(axis=0))


def sample(p: Distribution, n: int, rng: np.random.Generator) -> np.ndarray:
    """n i.i.d. draws from p, as 1-based domain elements.

    Inverse-CDF over a cumulative table: deterministic given the stream state
    and O(log k) per draw.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return np.empty(0, dtype=np.int64)
    cum = np.cumsum(p.mass)
    idx = np.searchsorted(cum, rng.random(n), side="right")
    return np.minimum(idx, p.k - 1).astype(np.int64) + 1


def sample_joint(joint: JointDistribution, n: int, rng: np.random.Generator) -> np.ndarray:
    """n i.i.d. draws from a joint distribution, as an (n, 2) array of 1-based pairs."""
    flat = sample(joint.flattened(), n, rng)
    rows = (flat - 1) // joint.k2 + 1
    cols = (flat - 1) % joint.k2 + 1
    return np.column_stack([rows, cols])


def paninski(domain_size: int, gamma: float, z: SignPattern) -> Distribution:
    """The +/-2*gamma perturbation of the uniform distribution on consecutive pairs.

    Element 2i-1 gets mass (1 - 2*gamma*z_i)/domain_size and element 2i gets
    (1 + 2*gamma*z_i)/domain_size, so the result sits at total variation
    distance exactly gamma from uniform.
    """
    if domain_size % 2 != 0 or domain_size <= 0:
        raise ValueError("domain size must be a positive even integer")
    if not 0.0 <= gamma <= 0.5:
        raise ValueError(f"gamma must lie in [0, 1/2], got {gamma}")
    if z.domain_size != domain_size:
        raise ValueError(f"sign pattern covers domain {z.domain_size}, expected {domain_size}")
    mass = np.empty(domain_size)
    shift = 2.0 * gamma * z.bits
    mass[0::2] = (1.0 - shift) / domain_size
    mass[1::2] = (1.0 + shift) / domain_size
    return Distribution(mass)
