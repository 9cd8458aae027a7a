"""``pcd-sampler`` command line front end.

Exit status of ``run``: 0 converged, 2 not converged (outputs still
written), 1 on any error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .config import ConfigError, RunConfig, load_config
from .density import DiracMixture, dirac_moments, mixture_moments
from .diagnostics import RunDiagnostics
from .optimizer import NonFiniteUpdateError, approximate, distance_nd_estimate
from .radon import Direction, project_dirac_mixture, project_gaussian_mixture, projected_cdf
from .sphere import deterministic_directions, directions_for_iteration
from .univariate import Samples1D, ecdf_at_samples, solve_standard_normal

THREADS_ENV = "PCD_SAMPLER_THREADS"
EXIT_OK, EXIT_ERROR, EXIT_NOT_CONVERGED = 0, 1, 2


def _fmt(x: float) -> str:
    # shortest round-trip form, independent of locale
    return repr(float(x))


def write_samples_csv(path: Path, dm: DiracMixture) -> None:
    """One row per Dirac: N coordinates followed by its weight, no header."""
    rows = np.vstack([dm.locations, dm.weights]).T
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def read_samples_csv(path: Path) -> DiracMixture:
    data = np.loadtxt(path, delimiter=",", ndmin=2)
    if data.shape[1] < 2:
        raise ValueError(f"{path}: expected N coordinate columns and a weight column")
    return DiracMixture(data[:, :-1].T, data[:, -1])


def _write_table(path: Path, header: str, columns) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# {header}\n")
        for row in zip(*columns):
            fh.write(" ".join(_fmt(v) for v in row) + "\n")


def write_plot_data(directory: Path, config: RunConfig, dm: DiracMixture, diag: RunDiagnostics) -> list[Path]:
    """Whitespace-separated tables: projected CDF vs sample CDF, sample scatter, convergence."""
    directory.mkdir(parents=True, exist_ok=True)
    gm = config.density
    pdir = config.output.get("plot_direction")
    u = Direction(pdir if pdir is not None else np.eye(gm.dimension)[0])
    pm = project_gaussian_mixture(gm, u)
    r = project_dirac_mixture(dm, u)
    sig = float(np.max(pm.stds))
    grid = np.linspace(min(r.min(), pm.means.min()) - 4 * sig, max(r.max(), pm.means.max()) + 4 * sig, 801)
    step = (grid[:, None] >= r[None, :]).astype(float) @ dm.weights
    paths = [directory / "projected_cdf.dat", directory / "samples_projected.dat", directory / "scatter.dat",
             directory / "convergence.dat"]
    _write_table(paths[0], f"direction {' '.join(_fmt(v) for v in u.u)}; r F_density F_samples",
                 [grid, projected_cdf(pm, grid), step])
    order = np.argsort(r, kind="stable")
    s = Samples1D(r, dm.weights)
    _write_table(paths[1], "r F_density(r) F_samples(r) weight",
                 [r[order], projected_cdf(pm, r)[order], ecdf_at_samples(s)[order], dm.weights[order]])
    coords = [dm.locations[i] for i in range(min(2, dm.dimension))]
    names = " ".join(f"x{i + 1}" for i in range(len(coords)))
    _write_table(paths[2], f"{names} weight", coords + [dm.weights])
    _write_table(paths[3], "iteration max_change", [np.arange(1, diag.iterations + 1), diag.max_changes])
    return paths


def _thread_count(requested: int) -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        requested = int(env)
    if requested == 0:
        return os.cpu_count() or 1
    return max(1, requested)


def diagnostics_document(config: RunConfig, dm: DiracMixture, diag: RunDiagnostics) -> dict:
    gm_mean, gm_cov = mixture_moments(config.density)
    dm_mean, dm_cov = dirac_moments(dm)
    scheme = config.optimizer.direction_scheme(config.density.dimension)
    doc = {
        "format_version": 1,
        "converged": diag.converged,
        "iterations": diag.iterations,
        "threshold": diag.threshold,
        "distance_initial": diag.distance_initial,
        "distance_final": diag.distance_final,
        "reorder_events": diag.reorder_events,
        "directions_per_iteration": scheme.count,
        "direction_scheme": scheme.kind,
        "step_size": config.optimizer.step_size,
        "seed": config.optimizer.seed,
        "moments": {
            "mixture_mean": gm_mean.tolist(),
            "samples_mean": dm_mean.tolist(),
            "mean_abs_error": np.abs(dm_mean - gm_mean).tolist(),
            "mixture_covariance": gm_cov.tolist(),
            "samples_covariance": dm_cov.tolist(),
            "covariance_rel_frobenius_error": float(np.linalg.norm(dm_cov - gm_cov) / np.linalg.norm(gm_cov)),
        },
        "max_changes": diag.max_changes,
    }
    return doc


def run(config: RunConfig) -> int:
    """Run the optimizer for ``config`` and write every requested output."""
    try:
        opt = config.optimizer
        threads = _thread_count(opt.threads)
        if threads != opt.threads:
            opt = replace(opt, threads=threads)
        dm, diag = approximate(config.density, opt)
        write_samples_csv(config.output_path("samples"), dm)
        with open(config.output_path("diagnostics"), "w", encoding="utf-8", newline="\n") as fh:
            json.dump(diagnostics_document(config, dm, diag), fh, indent=2)
            fh.write("\n")
        if config.output.get("emit_plot_data"):
            write_plot_data(config.output_path("plot_data"), config, dm, diag)
    except (OSError, ValueError, NonFiniteUpdateError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK if diag.converged else EXIT_NOT_CONVERGED


def _cmd_run(args) -> int:
    try:
        config = load_config(args.config)
    except (OSError, ConfigError) as exc:
        print(f"error: {args.config}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return run(config)


def _cmd_solve1d(args) -> int:
    if args.normal < 1:
        print("error: L must be at least 1", file=sys.stderr)
        return EXIT_ERROR
    for x in solve_standard_normal(args.normal):
        print(_fmt(x))
    return EXIT_OK


def _cmd_distance(args) -> int:
    try:
        config = load_config(args.config)
        dm = read_samples_csv(Path(args.samples))
        gm = config.density
        if dm.dimension != gm.dimension:
            raise ValueError(f"samples have dimension {dm.dimension}, density has {gm.dimension}")
        scheme = config.optimizer.direction_scheme(gm.dimension)
        dirs = directions_for_iteration(scheme, gm.dimension, 1) if scheme.redraws else deterministic_directions(scheme, gm.dimension)
        print(_fmt(distance_nd_estimate(gm, dm, dirs)))
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pcd-sampler", description="Deterministic Dirac mixture approximation of Gaussian mixtures")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="approximate the density of a configuration file")
    p.add_argument("config")
    p.set_defaults(func=_cmd_run)
    p = sub.add_parser("solve1d", help="print the closed-form sample locations of N(0, 1)")
    p.add_argument("--normal", type=int, required=True, metavar="L")
    p.set_defaults(func=_cmd_solve1d)
    p = sub.add_parser("distance", help="print the multivariate distance of a samples CSV")
    p.add_argument("config")
    p.add_argument("samples")
    p.set_defaults(func=_cmd_distance)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
