"""Dirac mixture approximation of a one-dimensional Gaussian mixture.

The objective is the integral squared distance between the mixture CDF and
the step CDF of the Dirac mixture. Its gradient only needs both CDFs at the
sample locations, and its Hessian is diagonal with entries ``2 w_i f(r_i)``,
so a Newton step decouples into independent per-sample updates.

Every function accepting ``Samples1D`` also works on a stack of problems
through the private ``_*_rows`` helpers used by the multivariate optimizer.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.special import erfinv

from .density import _check_weights, _frozen
from .diagnostics import RunDiagnostics
from .radon import ProjectedMixture1D, projected_cdf, projected_pdf

PDF_FLOOR = 1e-12
STEP_CAP = 3.0
GL_ORDER = 16
TAIL_SIGMAS = 10.0
MAX_GRID_PANELS = 4000

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(GL_ORDER)


@dataclass(frozen=True, init=False)
class Samples1D:
    """Locations and weights of a 1D Dirac mixture (equal weights by default)."""

    locations: NDArray
    weights: NDArray

    def __init__(self, locations: ArrayLike, weights: ArrayLike | None = None):
        r = np.atleast_1d(np.asarray(locations, dtype=float))
        if r.ndim != 1 or r.size == 0:
            raise ValueError("locations must be a non-empty vector")
        if not np.all(np.isfinite(r)):
            raise ValueError("locations must be finite")
        if weights is None:
            w = np.full(r.size, 1.0 / r.size)
        else:
            w = _check_weights(weights)
            if w.size != r.size:
                raise ValueError(f"weights: expected {r.size} entries, got {w.size}")
        object.__setattr__(self, "locations", _frozen(r))
        object.__setattr__(self, "weights", _frozen(w))

    def __len__(self) -> int:
        return self.locations.size


@dataclass(frozen=True)
class Solve1DOptions:
    step_size: float = 1.0
    threshold: float | None = None  # None: 1e-10 * (range of means + 6 sigma_max)
    max_iterations: int = 200

    def __post_init__(self):
        if not 0.0 < self.step_size <= 1.0:
            raise ValueError("step_size must lie in (0, 1]")
        if self.threshold is not None and not self.threshold > 0.0:
            raise ValueError("threshold must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")


def _ecdf_rows(r: NDArray, w: NDArray) -> NDArray:
    """Step CDF of each row of ``r`` evaluated at its own samples, H(0) = 1/2.

    Equal locations (exact float equality) share their weight half-and-half,
    which includes the self term ``w_i / 2``.
    """
    r = np.asarray(r, dtype=float)
    n = r.shape[-1]
    order = np.argsort(r, axis=-1, kind="stable")
    rs = np.take_along_axis(r, order, axis=-1)
    cum = np.concatenate([np.zeros(r.shape[:-1] + (1,)), np.cumsum(w[order], axis=-1)], axis=-1)
    idx = np.broadcast_to(np.arange(n), r.shape)
    new_group = np.concatenate([np.ones(r.shape[:-1] + (1,), bool), rs[..., 1:] != rs[..., :-1]], axis=-1)
    start = np.maximum.accumulate(np.where(new_group, idx, 0), axis=-1)
    group_end = np.concatenate([rs[..., 1:] != rs[..., :-1], np.ones(r.shape[:-1] + (1,), bool)], axis=-1)
    stop = np.flip(np.minimum.accumulate(np.flip(np.where(group_end, idx, n), axis=-1), axis=-1), axis=-1)
    below = np.take_along_axis(cum, start, axis=-1)
    through = np.take_along_axis(cum, stop + 1, axis=-1)
    out = np.empty_like(r)
    np.put_along_axis(out, order, 0.5 * (below + through), axis=-1)
    return out


def _newton_rows(pm: ProjectedMixture1D, r: NDArray, w: NDArray) -> NDArray:
    residual = projected_cdf(pm, r) - _ecdf_rows(r, w)
    dens = np.maximum(projected_pdf(pm, r), PDF_FLOOR)
    cap = STEP_CAP * np.asarray(pm.mean_std())[..., None]
    return np.clip(-residual / dens, -cap, cap)


def ecdf_at_samples(s: Samples1D) -> NDArray:
    """``F(r_i | r) = w_i / 2 + sum_{j != i} w_j H(r_i - r_j)`` for every sample."""
    return _ecdf_rows(s.locations, s.weights)


def distance_1d(pm: ProjectedMixture1D, s: Samples1D) -> float:
    """Integral squared distance between the mixture CDF and the sample step CDF.

    The step CDF is constant between consecutive samples, so the integral is
    split there and every piece is integrated with 16-point Gauss-Legendre.
    Pieces are further cut on a fixed grid derived from the mixture alone
    (spacing at most half the smallest component std), which keeps the
    quadrature error a continuous function of the sample locations. Tails
    are truncated ten standard deviations past the outermost sample or mean.
    """
    if pm.batch_shape:
        raise ValueError("distance_1d expects a single projected mixture")
    order = np.argsort(s.locations, kind="stable")
    rs = s.locations[order]
    cum = np.concatenate([[0.0], np.cumsum(s.weights[order])])
    sig_max = float(np.max(pm.stds))
    lo = float(np.min(pm.means)) - TAIL_SIGMAS * sig_max
    hi = float(np.max(pm.means)) + TAIL_SIGMAS * sig_max
    n_grid = int(min(MAX_GRID_PANELS, np.ceil((hi - lo) / (0.5 * float(np.min(pm.stds))))))
    grid = np.linspace(lo, hi, n_grid + 1)
    ends = [rs[0] - TAIL_SIGMAS * sig_max, rs[-1] + TAIL_SIGMAS * sig_max]
    edges = np.unique(np.concatenate([grid, rs, ends]))
    left, right = edges[:-1], edges[1:]
    level = cum[np.searchsorted(rs, left, side="right")]
    half = 0.5 * (right - left)
    nodes = (left + right)[:, None] * 0.5 + half[:, None] * _GL_NODES
    diff = projected_cdf(pm, nodes.ravel()).reshape(nodes.shape) - level[:, None]
    return float(np.sum(half * ((diff * diff) @ _GL_WEIGHTS)))


def gradient_1d(pm: ProjectedMixture1D, s: Samples1D) -> NDArray:
    """``2 w_i [F(r_i) - F(r_i | r)]``."""
    return 2.0 * s.weights * (projected_cdf(pm, s.locations) - ecdf_at_samples(s))


def hessian_diag_1d(pm: ProjectedMixture1D, s: Samples1D) -> NDArray:
    """Diagonal of the Hessian, ``2 w_i f(r_i)``; off-diagonal entries vanish."""
    return 2.0 * s.weights * projected_pdf(pm, s.locations)


def newton_step_1d(pm: ProjectedMixture1D, s: Samples1D) -> NDArray:
    """Per-sample Newton step ``-(F(r_i) - F(r_i | r)) / f(r_i)``.

    The density is floored at ``PDF_FLOOR`` and the step magnitude is capped
    at ``STEP_CAP`` times the weighted mean component std, so samples deep
    in a tail move by a bounded amount in the right direction.
    """
    return _newton_rows(pm, s.locations, s.weights)


def solve_standard_normal(n_samples: int) -> NDArray:
    """Closed-form equal-weight optimum for N(0, 1): ``sqrt(2) erfinv((2i - 1 - L) / L)``."""
    if n_samples < 1:
        raise ValueError("need at least one sample")
    i = np.arange(1, n_samples + 1)
    return np.sqrt(2.0) * erfinv((2.0 * i - 1.0 - n_samples) / n_samples)


def default_threshold(pm: ProjectedMixture1D) -> float:
    return 1e-10 * (float(np.ptp(pm.means)) + 6.0 * float(np.max(pm.stds)))


def quantile_init(pm: ProjectedMixture1D, weights: ArrayLike, tol_sigmas: float = 1e-3) -> Samples1D:
    """Sorted start: sample-CDF targets mapped through a coarse CDF bisection."""
    w = _check_weights(weights)
    targets = np.cumsum(w) - 0.5 * w
    sig_max = float(np.max(pm.stds))
    lo = np.full(w.size, float(np.min(pm.means)) - TAIL_SIGMAS * sig_max)
    hi = np.full(w.size, float(np.max(pm.means)) + TAIL_SIGMAS * sig_max)
    tol = tol_sigmas * float(np.min(pm.stds))
    while np.max(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        below = projected_cdf(pm, mid) < targets
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return Samples1D(0.5 * (lo + hi), w)


def solve_1d(
    pm: ProjectedMixture1D,
    init: Samples1D | None = None,
    options: Solve1DOptions | None = None,
    weights: ArrayLike | None = None,
    n_samples: int | None = None,
) -> tuple[Samples1D, RunDiagnostics]:
    """Newton iteration ``r += s * dr`` until ``max |s * dr_i|`` drops below the threshold.

    Without ``init``, starts from :func:`quantile_init` using ``weights`` or
    ``n_samples`` equal weights. Non-convergence is reported through
    ``RunDiagnostics.converged``, not raised. Steps that change the sample
    order are counted in ``reorder_events`` and kept as they are.
    """
    if pm.batch_shape:
        raise ValueError("solve_1d expects a single projected mixture")
    opts = options or Solve1DOptions()
    if init is None:
        if weights is None:
            if n_samples is None:
                raise ValueError("give init, weights or n_samples")
            weights = np.full(n_samples, 1.0 / n_samples)
        init = quantile_init(pm, weights)
    thr = opts.threshold if opts.threshold is not None else default_threshold(pm)
    r = np.array(init.locations)
    w = init.weights
    diag = RunDiagnostics(threshold=thr)
    for _ in range(opts.max_iterations):
        step = opts.step_size * _newton_rows(pm, r, w)
        r_new = r + step
        if not np.all(np.isfinite(r_new)):
            raise FloatingPointError(f"non-finite location in 1D iteration {diag.iterations + 1}")
        if not np.array_equal(np.argsort(r, kind="stable"), np.argsort(r_new, kind="stable")):
            diag.reorder_events += 1
        r = r_new
        diag.iterations += 1
        change = float(np.max(np.abs(step)))
        diag.max_changes.append(change)
        if change < thr:
            diag.converged = True
            break
    return Samples1D(r, w), diag
