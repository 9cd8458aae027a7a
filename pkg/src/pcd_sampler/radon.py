"""One-dimensional projections (Radon transforms) of Gaussian and Dirac mixtures.

Only the closed-form cases are supported: a Gaussian mixture projects to a
1D Gaussian mixture, and a Dirac mixture projects to Diracs at ``X^T u``.

Dot products are accumulated coordinate by coordinate in a fixed order, so
projecting onto one direction or onto a stack of directions yields
bit-identical values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.special import ndtr

from .density import DiracMixture, GaussianMixture, _frozen

UNIT_TOL = 1e-12
MIN_NORM = 1e-12
_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)


@dataclass(frozen=True, init=False)
class Direction:
    """Unit vector on the sphere S^{N-1}. The input vector is normalized."""

    u: NDArray

    def __init__(self, vector: ArrayLike):
        v = np.atleast_1d(np.asarray(vector, dtype=float))
        if v.ndim != 1:
            raise ValueError(f"direction must be a vector, got shape {v.shape}")
        norm = float(np.linalg.norm(v))
        if not np.isfinite(norm) or norm < MIN_NORM:
            raise ValueError(f"direction norm {norm!r} is too small to normalize")
        object.__setattr__(self, "u", _frozen(v / norm))

    @property
    def dimension(self) -> int:
        return self.u.size

    def __neg__(self) -> Direction:
        d = object.__new__(Direction)
        object.__setattr__(d, "u", _frozen(-self.u))
        return d


def as_unit_vectors(direction) -> NDArray:
    """Return a ``Direction``, a unit vector, or a (K, N) stack of unit rows as an array.

    Raw arrays are not normalized; rows off the unit sphere raise ``ValueError``.
    """
    if isinstance(direction, Direction):
        return direction.u
    if isinstance(direction, (list, tuple)) and direction and isinstance(direction[0], Direction):
        return np.stack([d.u for d in direction])
    u = np.asarray(direction, dtype=float)
    if u.ndim not in (1, 2):
        raise ValueError(f"directions must be a vector or a (K, N) matrix, got shape {u.shape}")
    norms = np.linalg.norm(np.atleast_2d(u), axis=1)
    if not np.all(np.abs(norms - 1.0) <= UNIT_TOL):
        raise ValueError("direction is not a unit vector")
    return u


def _dot(u: NDArray, x: NDArray) -> NDArray:
    """``sum_n u[..., n] * x[n, ...]`` with a fixed left-to-right accumulation order."""
    acc = u[..., 0, None] * x[0]
    for n in range(1, x.shape[0]):
        acc = acc + u[..., n, None] * x[n]
    return acc


def _quad_form(u: NDArray, covs: NDArray) -> NDArray:
    """``u^T C_m u`` for every covariance in ``covs`` (M, N, N); shape (..., M)."""
    n_dim = covs.shape[-1]
    acc = None
    for a in range(n_dim):
        for b in range(n_dim):
            term = (u[..., a, None] * u[..., b, None]) * covs[:, a, b]
            acc = term if acc is None else acc + term
    return acc


@dataclass(frozen=True, init=False)
class ProjectedMixture1D:
    """One-dimensional Gaussian mixture, or a stack of them.

    ``weights`` has shape (M,). ``means`` and ``stds`` have shape (M,) for a
    single mixture or (K, M) for K mixtures sharing the weights (one per
    projection direction).
    """

    weights: NDArray
    means: NDArray
    stds: NDArray

    def __init__(self, weights: ArrayLike, means: ArrayLike, stds: ArrayLike):
        w = np.atleast_1d(np.asarray(weights, dtype=float))
        m = np.asarray(means, dtype=float)
        s = np.asarray(stds, dtype=float)
        if m.ndim == 0:
            m = m[None]
        if s.ndim == 0:
            s = s[None]
        if m.shape != s.shape or m.shape[-1] != w.size:
            raise ValueError("weights, means and stds have inconsistent shapes")
        if np.any(w <= 0.0) or abs(float(np.sum(w)) - 1.0) > 1e-12:
            raise ValueError("weights must be positive and sum to 1")
        if not np.all(s > 0.0) or not np.all(np.isfinite(s)):
            raise ValueError("standard deviations must be positive and finite")
        object.__setattr__(self, "weights", _frozen(w))
        object.__setattr__(self, "means", _frozen(m))
        object.__setattr__(self, "stds", _frozen(s))

    @classmethod
    def normal(cls, mean: float = 0.0, std: float = 1.0) -> ProjectedMixture1D:
        return cls([1.0], [mean], [std])

    @property
    def batch_shape(self) -> tuple[int, ...]:
        return self.means.shape[:-1]

    def __getitem__(self, k) -> ProjectedMixture1D:
        if not self.batch_shape:
            raise IndexError("not a stacked mixture")
        return ProjectedMixture1D(self.weights, self.means[k], self.stds[k])

    def mean_std(self) -> NDArray:
        """Weighted mean of the component standard deviations."""
        return _wsum(self.stds, self.weights)


def project_gaussian(mean: ArrayLike, cov: ArrayLike, direction) -> tuple[float, float]:
    """Projected mean ``u^T mean`` and standard deviation ``sqrt(u^T C u)``."""
    u = as_unit_vectors(direction)
    mean = np.atleast_1d(np.asarray(mean, dtype=float))
    cov = np.asarray(cov, dtype=float).reshape(mean.size, mean.size)
    if u.shape != mean.shape:
        raise ValueError(f"direction has length {u.size}, mean has length {mean.size}")
    r = _dot(u, mean[:, None])[0]
    var = _quad_form(u, cov[None])[0]
    if not var > 0.0:
        raise ValueError("projected variance is not positive")
    return float(r), float(np.sqrt(var))


def project_gaussian_mixture(gm: GaussianMixture, direction) -> ProjectedMixture1D:
    """Project every component; a (K, N) stack of directions gives a stacked result."""
    u = as_unit_vectors(direction)
    if u.shape[-1] != gm.dimension:
        raise ValueError(f"direction has length {u.shape[-1]}, mixture dimension is {gm.dimension}")
    means = _dot(u, gm.means.T)
    var = _quad_form(u, gm.covariances)
    return ProjectedMixture1D(gm.weights, means, np.sqrt(var))


def project_dirac_mixture(dm: DiracMixture, direction) -> NDArray:
    """Projected Dirac locations ``X^T u``: shape (L,), or (K, L) for stacked directions."""
    u = as_unit_vectors(direction)
    if u.shape[-1] != dm.dimension:
        raise ValueError(f"direction has length {u.shape[-1]}, Dirac mixture dimension is {dm.dimension}")
    return _dot(u, dm.locations)


def _wsum(a: NDArray, w: NDArray) -> NDArray:
    """Weighted sum over the last axis, accumulated in index order."""
    acc = w[0] * a[..., 0]
    for m in range(1, w.size):
        acc = acc + w[m] * a[..., m]
    return acc


def _standardize(pm: ProjectedMixture1D, r: ArrayLike) -> NDArray:
    # r: (..., P) against means (..., M) -> z: (..., P, M)
    r = np.asarray(r, dtype=float)
    return (r[..., None] - pm.means[..., None, :]) / pm.stds[..., None, :]


def projected_pdf(pm: ProjectedMixture1D, r: ArrayLike) -> NDArray | float:
    """Density of the 1D mixture at ``r`` (scalar or array, broadcast over the stack)."""
    scalar = np.ndim(r) == 0
    z = _standardize(pm, np.atleast_1d(r))
    dens = _wsum(_INV_SQRT_2PI * np.exp(-0.5 * z * z) / pm.stds[..., None, :], pm.weights)
    return float(dens[0]) if scalar and dens.ndim == 1 else dens


def projected_cdf(pm: ProjectedMixture1D, r: ArrayLike) -> NDArray | float:
    """Cumulative distribution of the 1D mixture at ``r``."""
    scalar = np.ndim(r) == 0
    z = _standardize(pm, np.atleast_1d(r))
    cdf = _wsum(ndtr(z), pm.weights)
    return float(cdf[0]) if scalar and cdf.ndim == 1 else cdf
