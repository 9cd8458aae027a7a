import math

import numpy as np
import pytest

from pcd_sampler import GaussianMixture

I2 = np.eye(2)


def varying_means(a):
    return GaussianMixture([0.5, 0.5], [[-a, 0.0], [a, 0.0]], [I2, I2])


def varying_covariances(c):
    return GaussianMixture([0.5, 0.5], [[0.0, 0.0], [0.0, 0.0]], [[[3.0, c], [c, 3.0]], [[3.0, -c], [-c, 3.0]]])


# two-component 2D mixtures with equal weights: four mean offsets, four covariance pairs
SCENARIOS = {
    "means-0.0": varying_means(0.0),
    "means-0.7": varying_means(0.7),
    "means-1.4": varying_means(1.4),
    "means-2.1": varying_means(2.1),
    "covs-1.5": varying_covariances(1.5),
    "covs-2.0": varying_covariances(2.0),
    "covs-2.5": varying_covariances(2.5),
    "covs-2.8": varying_covariances(2.8),
}

# three-component 1D mixtures (weights, means, stds)
MIXTURES_1D = [
    ([0.3, 0.5, 0.2], [-2.0, 0.0, 3.0], [0.5, 1.0, 0.7]),
    ([0.2, 0.2, 0.6], [-1.0, 1.5, 4.0], [1.0, 0.3, 1.5]),
    ([0.5, 0.25, 0.25], [0.0, -3.0, 2.0], [2.0, 0.4, 0.4]),
]


def normal_cdf(x):
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))


def normal_pdf(x):
    return math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


def erfinv_bisect(y, tol=1e-16):
    """Inverse error function by bisection on math.erf."""
    lo, hi = -7.0, 7.0
    while hi - lo > tol * max(1.0, abs(lo)):
        mid = 0.5 * (lo + hi)
        if math.erf(mid) < y:
            lo = mid
        else:
            hi = mid
        if mid in (lo, hi) and hi - lo < 1e-15:
            break
    return 0.5 * (lo + hi)


def trapezoid_distance(cdf, locations, weights, lo, hi, nodes=1_000_001):
    """Integral of (F - step CDF)^2 by the trapezoid rule.

    The range is split at the sample locations so each piece has a constant
    step level; ``nodes`` are shared between pieces in proportion to length.
    """
    order = np.argsort(locations)
    xs = np.asarray(locations, dtype=float)[order]
    levels = np.concatenate([[0.0], np.cumsum(np.asarray(weights, dtype=float)[order])])
    edges = np.concatenate([[lo], xs, [hi]])
    total = 0.0
    for a, b, level in zip(edges[:-1], edges[1:], levels):
        if b <= a:
            continue
        n = max(3, int(nodes * (b - a) / (hi - lo)))
        t = np.linspace(a, b, n)
        total += float(np.trapezoid((cdf(t) - level) ** 2, t))
    return total


@pytest.fixture(params=list(SCENARIOS), ids=list(SCENARIOS))
def scenario(request):
    return request.param, SCENARIOS[request.param]
