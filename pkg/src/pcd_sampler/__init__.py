"""Deterministic Dirac mixture approximation of Gaussian mixtures via projected cumulative distributions."""

from .density import DiracMixture, GaussianMixture, dirac_moments, eval_pdf, mixture_moments
from .diagnostics import RunDiagnostics
from .optimizer import (
    NonFiniteUpdateError,
    OptimizerConfig,
    approximate,
    backproject,
    combined_update,
    directional_update,
    distance_nd_estimate,
)
from .radon import (
    Direction,
    ProjectedMixture1D,
    project_dirac_mixture,
    project_gaussian,
    project_gaussian_mixture,
    projected_cdf,
    projected_pdf,
)
from .sphere import DirectionScheme, deterministic_directions, random_unit_vector, sphere_surface_area
from .univariate import (
    Samples1D,
    Solve1DOptions,
    distance_1d,
    ecdf_at_samples,
    gradient_1d,
    hessian_diag_1d,
    newton_step_1d,
    solve_1d,
    solve_standard_normal,
)

__version__ = "0.1.0"
