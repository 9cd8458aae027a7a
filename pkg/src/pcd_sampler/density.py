"""Continuous Gaussian mixtures and their discrete Dirac mixture approximations."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

WEIGHT_TOL = 1e-12
RENORMALIZE_TOL = 1e-9
SYMMETRY_TOL = 1e-12


def _frozen(a: NDArray) -> NDArray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _check_weights(weights: ArrayLike, name: str = "weights") -> NDArray:
    w = np.asarray(weights, dtype=float).reshape(-1)
    if w.size == 0:
        raise ValueError(f"{name}: at least one weight is required")
    if not np.all(np.isfinite(w)) or np.any(w <= 0.0):
        raise ValueError(f"{name}: all weights must be finite and strictly positive")
    total = float(np.sum(w))
    if abs(total - 1.0) > RENORMALIZE_TOL:
        raise ValueError(f"{name}: weights sum to {total!r}, expected 1")
    if abs(total - 1.0) > WEIGHT_TOL:
        w = w / total
    return w


@dataclass(frozen=True, init=False)
class GaussianMixture:
    """N-dimensional Gaussian mixture ``sum_i w_i N(x; mean_i, cov_i)``.

    Parameters
    ----------
    weights : array_like, shape (M,)
        Component weights. Positive, summing to one (sums off by less
        than 1e-9 are renormalized).
    means : array_like, shape (M, N)
    covariances : array_like, shape (M, N, N)
        Symmetric positive definite matrices.

    Raises
    ------
    ValueError
        On shape mismatch, bad weights, or a covariance that is not
        symmetric positive definite.
    """

    weights: NDArray
    means: NDArray
    covariances: NDArray
    cholesky: NDArray

    def __init__(self, weights: ArrayLike, means: ArrayLike, covariances: ArrayLike):
        w = _check_weights(weights)
        m = np.asarray(means, dtype=float)
        c = np.asarray(covariances, dtype=float)
        if m.ndim == 1 and w.size == 1:
            m = m[None, :]
        if c.ndim == 2 and w.size == 1:
            c = c[None, :, :]
        if m.ndim != 2 or m.shape[0] != w.size:
            raise ValueError(f"means: expected shape ({w.size}, N), got {m.shape}")
        n = m.shape[1]
        if n < 1:
            raise ValueError("means: dimension must be at least 1")
        if c.shape != (w.size, n, n):
            raise ValueError(f"covariances: expected shape ({w.size}, {n}, {n}), got {c.shape}")
        if not (np.all(np.isfinite(m)) and np.all(np.isfinite(c))):
            raise ValueError("means/covariances must be finite")
        chol = np.empty_like(c)
        for i, ci in enumerate(c):
            if np.max(np.abs(ci - ci.T)) > SYMMETRY_TOL * max(1.0, np.max(np.abs(ci))):
                raise ValueError(f"covariances[{i}]: not symmetric")
            try:
                chol[i] = np.linalg.cholesky(ci)
            except np.linalg.LinAlgError:
                raise ValueError(f"covariances[{i}]: not positive definite") from None
        object.__setattr__(self, "weights", _frozen(w))
        object.__setattr__(self, "means", _frozen(m))
        object.__setattr__(self, "covariances", _frozen(c))
        object.__setattr__(self, "cholesky", _frozen(chol))

    @classmethod
    def gaussian(cls, mean: ArrayLike, cov: ArrayLike) -> GaussianMixture:
        """Single-component mixture."""
        mean = np.atleast_1d(np.asarray(mean, dtype=float))
        cov = np.asarray(cov, dtype=float).reshape(mean.size, mean.size)
        return cls([1.0], mean[None, :], cov[None, :, :])

    @property
    def dimension(self) -> int:
        return self.means.shape[1]

    @property
    def n_components(self) -> int:
        return self.weights.size

    def translate(self, shift: ArrayLike) -> GaussianMixture:
        return GaussianMixture(self.weights, self.means + np.asarray(shift, dtype=float), self.covariances)

    def transform(self, matrix: ArrayLike) -> GaussianMixture:
        """Push forward through ``x -> A x`` (A square, invertible)."""
        a = np.asarray(matrix, dtype=float)
        cov = np.einsum("ij,mjk,lk->mil", a, self.covariances, a)
        cov = 0.5 * (cov + np.swapaxes(cov, 1, 2))
        return GaussianMixture(self.weights, self.means @ a.T, cov)

    def sample(self, rng: np.random.Generator, size: int) -> NDArray:
        """Draw ``size`` points; returns an (N, size) matrix (columns are points)."""
        comp = rng.choice(self.n_components, size=size, p=self.weights)
        z = rng.standard_normal((size, self.dimension))
        pts = self.means[comp] + np.einsum("lij,lj->li", self.cholesky[comp], z)
        return pts.T


@dataclass(frozen=True, init=False)
class DiracMixture:
    """Weighted point set; ``locations`` is N x L with one column per Dirac."""

    weights: NDArray
    locations: NDArray

    def __init__(self, locations: ArrayLike, weights: ArrayLike | None = None):
        x = np.asarray(locations, dtype=float)
        if x.ndim == 1:
            x = x[None, :]
        if x.ndim != 2 or x.shape[1] < 1:
            raise ValueError(f"locations: expected an N x L matrix, got shape {x.shape}")
        if not np.all(np.isfinite(x)):
            raise ValueError("locations must be finite")
        n_dirac = x.shape[1]
        if weights is None:
            w = np.full(n_dirac, 1.0 / n_dirac)
        else:
            w = _check_weights(weights)
            if w.size != n_dirac:
                raise ValueError(f"weights: expected {n_dirac} entries, got {w.size}")
        object.__setattr__(self, "weights", _frozen(w))
        object.__setattr__(self, "locations", _frozen(x))

    @property
    def dimension(self) -> int:
        return self.locations.shape[0]

    @property
    def size(self) -> int:
        return self.locations.shape[1]

    def with_locations(self, locations: ArrayLike) -> DiracMixture:
        return DiracMixture(locations, self.weights)


def eval_pdf(gm: GaussianMixture, x: ArrayLike) -> float:
    """Mixture density at a single point ``x`` of length N."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (gm.dimension,):
        raise ValueError(f"x: expected length {gm.dimension}, got shape {x.shape}")
    n = gm.dimension
    total = 0.0
    for w, mean, chol in zip(gm.weights, gm.means, gm.cholesky):
        y = np.linalg.solve(chol, x - mean)
        log_det = 2.0 * np.sum(np.log(np.diag(chol)))
        total += w * np.exp(-0.5 * (y @ y) - 0.5 * log_det - 0.5 * n * np.log(2.0 * np.pi))
    return float(total)


def mixture_moments(gm: GaussianMixture) -> tuple[NDArray, NDArray]:
    """Mean and covariance of the mixture (law of total variance)."""
    w = gm.weights
    mean = w @ gm.means
    d = gm.means - mean
    cov = np.einsum("m,mij->ij", w, gm.covariances + d[:, :, None] * d[:, None, :])
    return mean, 0.5 * (cov + cov.T)


def dirac_moments(dm: DiracMixture) -> tuple[NDArray, NDArray]:
    """Weighted mean and population covariance of the Dirac locations."""
    w = dm.weights
    mean = dm.locations @ w
    centered = dm.locations - mean[:, None]
    cov = (centered * w) @ centered.T
    return mean, 0.5 * (cov + cov.T)
