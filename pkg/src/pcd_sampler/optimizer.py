"""Multivariate Dirac mixture approximation by averaged projected Newton steps.

Each iteration projects the Gaussian mixture and the current Dirac
locations onto K unit vectors, takes the 1D Newton step of every sample in
every projection, maps the steps back along their direction and averages:

    X += (s / K) * sum_k u_k dr_k^T

until the largest column change drops below the threshold.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .density import DiracMixture, GaussianMixture, mixture_moments
from .diagnostics import RunDiagnostics
from .radon import Direction, as_unit_vectors, project_dirac_mixture, project_gaussian_mixture
from .sphere import (
    EQUIANGULAR_2D,
    FIXED_SEED_RANDOM,
    DirectionScheme,
    deterministic_directions,
    directions_for_iteration,
    make_rng,
)
from .univariate import Samples1D, _newton_rows, distance_1d, solve_standard_normal

INIT_SAMPLE = "sample"
INIT_EXPLICIT = "explicit"
INIT_PRINCIPAL_AXES = "principal-axes"
INIT_POLICIES = (INIT_SAMPLE, INIT_EXPLICIT, INIT_PRINCIPAL_AXES)

# xor-ed into the run seed for the initial draws, keeps them apart from the direction streams
INIT_STREAM = 0x9E3779B97F4A7C15
EVALUATION_DIRECTIONS = 256
EVALUATION_SEED = 0


class NonFiniteUpdateError(FloatingPointError):
    def __init__(self, iteration: int, direction_index: int):
        super().__init__(f"non-finite update in iteration {iteration}, direction index {direction_index}")
        self.iteration = iteration
        self.direction_index = direction_index


@dataclass(frozen=True)
class OptimizerConfig:
    """Settings of :func:`approximate`. ``None`` fields are resolved from the density.

    Defaults: K = 10 N directions, threshold = 1e-6 sqrt(trace Cov), the
    equiangular half-circle set in 2D and a fixed seeded random set
    otherwise.
    """

    n_samples: int
    directions: int | None = None
    step_size: float = 0.5
    max_iterations: int = 5000
    threshold: float | None = None
    scheme: str | None = None
    seed: int = 0
    init: str = INIT_SAMPLE
    init_locations: NDArray | None = None
    weights: NDArray | None = None
    threads: int = 1
    evaluate_distance: bool = True

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("n_samples must be at least 1")
        if self.directions is not None and self.directions < 1:
            raise ValueError("directions must be at least 1")
        if not 0.0 < self.step_size <= 1.0:
            raise ValueError("step_size must lie in (0, 1]")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.threshold is not None and not self.threshold > 0.0:
            raise ValueError("threshold must be positive")
        if self.init not in INIT_POLICIES:
            raise ValueError(f"unknown init policy {self.init!r}; expected one of {INIT_POLICIES}")
        if self.init == INIT_EXPLICIT and self.init_locations is None:
            raise ValueError("init 'explicit' needs init_locations")
        if self.threads < 0:
            raise ValueError("threads must be non-negative")

    def direction_scheme(self, dimension: int) -> DirectionScheme:
        count = self.directions if self.directions is not None else 10 * dimension
        kind = self.scheme or (EQUIANGULAR_2D if dimension == 2 else FIXED_SEED_RANDOM)
        return DirectionScheme(kind, count, self.seed)

    def resolved_threshold(self, gm: GaussianMixture) -> float:
        if self.threshold is not None:
            return self.threshold
        return 1e-6 * math.sqrt(float(np.trace(mixture_moments(gm)[1])))


def _canonical(u: NDArray) -> NDArray:
    """Representative of ``{u, -u}`` whose first non-zero coordinate is positive."""
    u = np.atleast_2d(u)
    nonzero = u != 0.0
    first = np.take_along_axis(u, np.argmax(nonzero, axis=1)[:, None], axis=1)
    return np.where(first < 0.0, -u, u)


def _projected_steps(gm: GaussianMixture, dm: DiracMixture, u: NDArray, threads: int = 1) -> tuple[NDArray, NDArray]:
    """Projections (K, L) and per-direction Newton steps (K, L) for canonical rows ``u``."""
    if threads > 1 and u.shape[0] > 1:
        chunks = np.array_split(np.arange(u.shape[0]), min(threads, u.shape[0]))
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            parts = list(pool.map(lambda idx: _projected_steps(gm, dm, u[idx]), chunks))
        return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])
    pm = project_gaussian_mixture(gm, u)
    r = project_dirac_mixture(dm, u)
    return r, _newton_rows(pm, r, dm.weights)


def backproject(dr: ArrayLike, direction) -> NDArray:
    """Move every sample along ``u`` by its 1D step: the N x L matrix ``u dr^T``."""
    u = as_unit_vectors(direction)
    return np.outer(u, np.asarray(dr, dtype=float))


def directional_update(gm: GaussianMixture, dm: DiracMixture, direction) -> NDArray:
    """Backprojected Newton update of all locations for one direction.

    ``u`` and ``-u`` give the same update, and both are computed through
    the same canonical representative so the identity holds bit for bit.
    """
    u = _canonical(as_unit_vectors(direction))
    if u.shape[1] != gm.dimension or dm.dimension != gm.dimension:
        raise ValueError("dimension mismatch between direction, mixture and Dirac mixture")
    _, dr = _projected_steps(gm, dm, u)
    return backproject(dr[0], u[0])


def _accumulate(u: NDArray, dr: NDArray, step_size: float, iteration: int = 0) -> NDArray:
    total = np.zeros((u.shape[1], dr.shape[1]))
    for k in range(u.shape[0]):
        if not np.all(np.isfinite(dr[k])):
            raise NonFiniteUpdateError(iteration, k)
        total = total + np.outer(u[k], dr[k])
    return (step_size / u.shape[0]) * total


def combined_update(
    gm: GaussianMixture,
    dm: DiracMixture,
    directions,
    step_size: float = 1.0,
    threads: int = 1,
) -> NDArray:
    """``(s / K) sum_k directional_update(u_k)``, summed in list order."""
    u = _canonical(as_unit_vectors(directions))
    if u.shape[1] != gm.dimension or dm.dimension != gm.dimension:
        raise ValueError("dimension mismatch between directions, mixture and Dirac mixture")
    _, dr = _projected_steps(gm, dm, u, threads)
    return _accumulate(u, dr, step_size)


def distance_nd_estimate(gm: GaussianMixture, dm: DiracMixture, directions) -> float:
    """Sphere average of the 1D distances, discretized as a plain mean over ``directions``."""
    u = np.atleast_2d(as_unit_vectors(directions))
    pms = project_gaussian_mixture(gm, u)
    rs = project_dirac_mixture(dm, u)
    values = [distance_1d(pms[k], Samples1D(rs[k], dm.weights)) for k in range(u.shape[0])]
    return float(np.mean(values))


def evaluation_directions(dimension: int, count: int = EVALUATION_DIRECTIONS) -> list[Direction]:
    """Fixed direction set for reporting the multivariate distance."""
    if dimension == 1:
        return [Direction([1.0])]
    kind = EQUIANGULAR_2D if dimension == 2 else FIXED_SEED_RANDOM
    return deterministic_directions(DirectionScheme(kind, count, EVALUATION_SEED), dimension)


def principal_axes_init(gm: GaussianMixture, n_samples: int) -> NDArray:
    """Lattice of standard-normal quantiles along the principal axes of a single Gaussian.

    Takes ``ceil(L^(1/N))`` quantiles per axis and keeps the ``L`` lattice
    points closest to the mean.
    """
    if gm.n_components != 1:
        raise ValueError("principal-axes init needs a single Gaussian")
    n = gm.dimension
    per_axis = max(1, math.ceil(n_samples ** (1.0 / n) - 1e-9))
    while per_axis**n < n_samples:
        per_axis += 1
    q = solve_standard_normal(per_axis)
    grid = np.stack(np.meshgrid(*([q] * n), indexing="ij"), axis=-1).reshape(-1, n)
    keep = np.argsort(np.sum(grid * grid, axis=1), kind="stable")[:n_samples]
    evals, evecs = np.linalg.eigh(gm.covariances[0])
    return gm.means[0][:, None] + (evecs * np.sqrt(evals)) @ grid[keep].T


def initial_locations(gm: GaussianMixture, config: OptimizerConfig) -> NDArray:
    if config.init == INIT_EXPLICIT:
        x = np.asarray(config.init_locations, dtype=float)
        if x.ndim == 1 and gm.dimension == 1:
            x = x[None, :]
        if x.shape != (gm.dimension, config.n_samples):
            raise ValueError(f"init_locations: expected shape ({gm.dimension}, {config.n_samples}), got {x.shape}")
        return x.copy()
    if config.init == INIT_PRINCIPAL_AXES:
        return principal_axes_init(gm, config.n_samples)
    return gm.sample(make_rng(config.seed ^ INIT_STREAM), config.n_samples)


def approximate(gm: GaussianMixture, config: OptimizerConfig) -> tuple[DiracMixture, RunDiagnostics]:
    """Place ``config.n_samples`` Diracs approximating ``gm``.

    Returns the final Dirac mixture and its diagnostics. Non-convergence is
    reported through ``RunDiagnostics.converged``; a non-finite update raises
    :class:`NonFiniteUpdateError`.
    """
    scheme = config.direction_scheme(gm.dimension)
    thr = config.resolved_threshold(gm)
    dm = DiracMixture(initial_locations(gm, config), config.weights)
    diag = RunDiagnostics(threshold=thr, directions_per_iteration=scheme.count)
    eval_dirs = evaluation_directions(gm.dimension) if config.evaluate_distance else None
    if eval_dirs is not None:
        diag.distance_initial = distance_nd_estimate(gm, dm, eval_dirs)

    fixed = None if scheme.redraws else _canonical(as_unit_vectors(deterministic_directions(scheme, gm.dimension)))
    x = np.array(dm.locations)
    for it in range(1, config.max_iterations + 1):
        u = fixed if fixed is not None else _canonical(as_unit_vectors(directions_for_iteration(scheme, gm.dimension, it)))
        r, dr = _projected_steps(gm, dm, u, config.threads)
        delta = _accumulate(u, dr, config.step_size, it)
        diag.reorder_events += int(np.sum(np.any(np.argsort(r, axis=1) != np.argsort(r + dr, axis=1), axis=1)))
        x = x + delta
        dm = dm.with_locations(x)
        diag.iterations = it
        change = float(np.max(np.linalg.norm(delta, axis=0)))
        diag.max_changes.append(change)
        if change < thr:
            diag.converged = True
            break

    if eval_dirs is not None:
        diag.distance_final = distance_nd_estimate(gm, dm, eval_dirs)
    return dm, diag
