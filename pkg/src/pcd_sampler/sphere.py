"""Projection directions on the unit sphere and sphere surface areas.

Random directions come from numpy's PCG64 generator (128-bit state) seeded
with a 64-bit integer. Direction sets redrawn per iteration use the sub-seed
``seed ^ iteration``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .radon import Direction

RANDOM_GAUSSIAN = "random-gaussian"
EQUIANGULAR_2D = "deterministic-2d-equiangular"
FIXED_SEED_RANDOM = "fixed-seed-random"
SCHEME_KINDS = (RANDOM_GAUSSIAN, EQUIANGULAR_2D, FIXED_SEED_RANDOM)

_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class DirectionScheme:
    """How K projection directions are produced.

    ``random-gaussian`` draws a fresh set every iteration, the other two
    kinds yield one fixed set.
    """

    kind: str
    count: int
    seed: int = 0

    def __post_init__(self):
        if self.kind not in SCHEME_KINDS:
            raise ValueError(f"unknown direction scheme {self.kind!r}; expected one of {SCHEME_KINDS}")
        if self.count < 1:
            raise ValueError("direction count must be at least 1")
        if not 0 <= self.seed <= _SEED_MASK:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def redraws(self) -> bool:
        return self.kind == RANDOM_GAUSSIAN


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed & _SEED_MASK))


def random_unit_vector(rng: np.random.Generator, dimension: int) -> Direction:
    """Normalized standard normal draw, uniform on S^{N-1}."""
    if dimension < 1:
        raise ValueError("dimension must be at least 1")
    while True:
        v = rng.standard_normal(dimension)
        norm = float(np.linalg.norm(v))
        if norm > 1e-12:
            return Direction(v)


def _random_set(seed: int, count: int, dimension: int) -> list[Direction]:
    rng = make_rng(seed)
    return [random_unit_vector(rng, dimension) for _ in range(count)]


def deterministic_directions(scheme: DirectionScheme, dimension: int) -> list[Direction]:
    """The fixed direction set of ``scheme``.

    The 2D equiangular set covers the half circle, angles ``pi (k - 1) / K``;
    ``-u`` carries the same information as ``u``.
    """
    if scheme.kind == EQUIANGULAR_2D:
        if dimension != 2:
            raise ValueError("deterministic-2d-equiangular requires dimension 2")
        theta = np.pi * np.arange(scheme.count) / scheme.count
        return [Direction([math.cos(t), math.sin(t)]) for t in theta]
    if scheme.kind == FIXED_SEED_RANDOM:
        return _random_set(scheme.seed, scheme.count, dimension)
    raise ValueError(f"{scheme.kind!r} has no fixed direction set")


def directions_for_iteration(scheme: DirectionScheme, dimension: int, iteration: int) -> list[Direction]:
    """Directions used in outer iteration ``iteration`` (1-based)."""
    if scheme.redraws:
        return _random_set(scheme.seed ^ iteration, scheme.count, dimension)
    return deterministic_directions(scheme, dimension)


def sphere_surface_area(dimension: int) -> float:
    """Surface area of S^{N-1} in R^N via ``A_N = 2 pi / (N - 2) A_{N-2}``, ``A_0 = 0``."""
    if dimension < 0:
        raise ValueError("dimension must be non-negative")
    if dimension == 0:
        return 0.0
    area = 2.0 if dimension % 2 else 2.0 * math.pi
    for n in range(4 - dimension % 2, dimension + 1, 2):
        area *= 2.0 * math.pi / (n - 2)
    return area


def sphere_surface_area_gamma(dimension: int) -> float:
    """Closed form ``2 pi^{N/2} / Gamma(N/2)``."""
    return 2.0 * math.pi ** (dimension / 2) / math.gamma(dimension / 2)
