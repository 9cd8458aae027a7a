"""Run configuration documents (JSON, ``format_version`` 1).

Example::

    {
      "format_version": 1,
      "density": {
        "type": "gaussian_mixture",
        "weights": [0.5, 0.5],
        "means": [[-0.7, 0.0], [0.7, 0.0]],
        "covariances": [[[1, 0], [0, 1]], [[1, 0], [0, 1]]]
      },
      "L": 50,
      "sample_weights": null,
      "optimizer": {"directions": null, "step_size": 0.5, "threshold": null,
                    "max_iterations": 5000, "scheme": null, "seed": 7, "threads": 1},
      "init": {"policy": "sample", "locations": null},
      "output": {"samples": "samples.csv", "diagnostics": "diagnostics.json",
                 "plot_data": "plot", "emit_plot_data": false, "plot_direction": null}
    }

Only ``density`` and ``L`` are required. Output paths are relative to the
directory holding the configuration file.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .density import GaussianMixture, _check_weights
from .optimizer import INIT_POLICIES, OptimizerConfig
from .sphere import SCHEME_KINDS

FORMAT_VERSION = 1
DENSITY_TYPE = "gaussian_mixture"

OPTIMIZER_DEFAULTS = {
    "directions": None,
    "step_size": 0.5,
    "threshold": None,
    "max_iterations": 5000,
    "scheme": None,
    "seed": 0,
    "threads": 1,
}
INIT_DEFAULTS = {"policy": "sample", "locations": None}
OUTPUT_DEFAULTS = {
    "samples": "samples.csv",
    "diagnostics": "diagnostics.json",
    "plot_data": "plot",
    "emit_plot_data": False,
    "plot_direction": None,
}
TOP_LEVEL_KEYS = {"format_version", "density", "L", "sample_weights", "optimizer", "init", "output"}


class ConfigError(ValueError):
    """Malformed or invalid configuration; the message names the line or field."""


@dataclass
class RunConfig:
    density: GaussianMixture
    optimizer: OptimizerConfig
    output: dict[str, Any] = field(default_factory=lambda: dict(OUTPUT_DEFAULTS))
    base_dir: Path = Path(".")
    raw: dict[str, Any] = field(default_factory=dict, repr=False)

    def output_path(self, key: str) -> Path:
        return self.base_dir / self.output[key]


def _section(doc: dict, key: str, defaults: dict) -> dict:
    value = doc.get(key)
    if value is None:
        return dict(defaults)
    if not isinstance(value, dict):
        raise ConfigError(f"{key}: expected an object")
    unknown = set(value) - set(defaults)
    if unknown:
        raise ConfigError(f"{key}: unknown field(s) {sorted(unknown)}")
    return {**defaults, **value}


def _number_array(value, name: str) -> np.ndarray:
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        raise ConfigError(f"{name}: expected a (nested) array of numbers") from None
    if not np.all(np.isfinite(arr)):
        raise ConfigError(f"{name}: values must be finite")
    return arr


def _int(value, name: str, minimum: int | None = None, optional: bool = False) -> int | None:
    if value is None and optional:
        return None
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{name}: expected an integer")
    if minimum is not None and value < minimum:
        raise ConfigError(f"{name}: must be at least {minimum}")
    return value


def _float(value, name: str, optional: bool = False) -> float | None:
    if value is None and optional:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(f"{name}: expected a finite number")
    return float(value)


def _parse_density(doc) -> GaussianMixture:
    if not isinstance(doc, dict):
        raise ConfigError("density: expected an object")
    unknown = set(doc) - {"type", "weights", "means", "covariances"}
    if unknown:
        raise ConfigError(f"density: unknown field(s) {sorted(unknown)}")
    if doc.get("type") != DENSITY_TYPE:
        raise ConfigError(f"density.type: expected {DENSITY_TYPE!r}")
    for key in ("weights", "means", "covariances"):
        if key not in doc:
            raise ConfigError(f"density.{key}: missing")
    w = _number_array(doc["weights"], "density.weights").reshape(-1)
    m = _number_array(doc["means"], "density.means")
    c = _number_array(doc["covariances"], "density.covariances")
    if m.ndim == 1:
        m = m[:, None]  # one scalar mean per component
    if m.ndim != 2 or m.shape[0] != w.size:
        raise ConfigError(f"density.means: expected {w.size} mean vectors")
    n = m.shape[1]
    if c.ndim == 1 and n == 1:
        c = c[:, None, None]
    if c.shape != (w.size, n, n):
        raise ConfigError(f"density.covariances: expected {w.size} matrices of size {n}x{n}, got shape {c.shape}")
    try:
        return GaussianMixture(w, m, c)
    except ValueError as exc:
        raise ConfigError(f"density.{exc}") from None


def parse_config(text: str, base_dir: str | Path = ".") -> RunConfig:
    """Parse and fully validate a configuration document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ConfigError("top level: expected an object")
    unknown = set(doc) - TOP_LEVEL_KEYS
    if unknown:
        raise ConfigError(f"top level: unknown field(s) {sorted(unknown)}")
    version = doc.get("format_version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise ConfigError(f"format_version: unsupported version {version!r}")
    if "density" not in doc:
        raise ConfigError("density: missing")
    gm = _parse_density(doc["density"])
    n_samples = _int(doc.get("L"), "L", minimum=1)

    opt = _section(doc, "optimizer", OPTIMIZER_DEFAULTS)
    init = _section(doc, "init", INIT_DEFAULTS)
    out = _section(doc, "output", OUTPUT_DEFAULTS)

    scheme = opt["scheme"]
    if scheme is not None and scheme not in SCHEME_KINDS:
        raise ConfigError(f"optimizer.scheme: expected one of {SCHEME_KINDS}")
    if scheme == "deterministic-2d-equiangular" and gm.dimension != 2:
        raise ConfigError("optimizer.scheme: deterministic-2d-equiangular requires a 2D density")
    seed = _int(opt["seed"], "optimizer.seed", minimum=0)
    if seed >= 1 << 64:
        raise ConfigError("optimizer.seed: must fit in 64 bits")
    if init["policy"] not in INIT_POLICIES:
        raise ConfigError(f"init.policy: expected one of {INIT_POLICIES}")

    locations = None
    if init["locations"] is not None:
        locations = _number_array(init["locations"], "init.locations")
        if locations.ndim == 1 and gm.dimension == 1:
            locations = locations[None, :]
        if locations.shape != (gm.dimension, n_samples):
            raise ConfigError(f"init.locations: expected a {gm.dimension}x{n_samples} matrix, got shape {locations.shape}")
    weights = None
    if doc.get("sample_weights") is not None:
        weights = _number_array(doc["sample_weights"], "sample_weights").reshape(-1)
        if weights.size != n_samples:
            raise ConfigError(f"sample_weights: expected {n_samples} entries")
    if out["plot_direction"] is not None:
        pdir = _number_array(out["plot_direction"], "output.plot_direction").reshape(-1)
        if pdir.size != gm.dimension or np.linalg.norm(pdir) < 1e-12:
            raise ConfigError(f"output.plot_direction: expected a non-zero vector of length {gm.dimension}")
    if not isinstance(out["emit_plot_data"], bool):
        raise ConfigError("output.emit_plot_data: expected true or false")
    for key in ("samples", "diagnostics", "plot_data"):
        if not isinstance(out[key], str) or not out[key]:
            raise ConfigError(f"output.{key}: expected a path string")

    try:
        optimizer = OptimizerConfig(
            n_samples=n_samples,
            directions=_int(opt["directions"], "optimizer.directions", minimum=1, optional=True),
            step_size=_float(opt["step_size"], "optimizer.step_size"),
            max_iterations=_int(opt["max_iterations"], "optimizer.max_iterations", minimum=1),
            threshold=_float(opt["threshold"], "optimizer.threshold", optional=True),
            scheme=scheme,
            seed=seed,
            init=init["policy"],
            init_locations=locations,
            weights=weights,
            threads=_int(opt["threads"], "optimizer.threads", minimum=0),
        )
    except ValueError as exc:
        raise ConfigError(f"optimizer: {exc}") from None
    if weights is not None:
        try:
            _check_weights(weights, "sample_weights")
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    raw = {
        "format_version": FORMAT_VERSION,
        "density": {
            "type": DENSITY_TYPE,
            "weights": gm.weights.tolist(),
            "means": gm.means.tolist(),
            "covariances": gm.covariances.tolist(),
        },
        "L": n_samples,
        "sample_weights": None if weights is None else weights.tolist(),
        "optimizer": opt,
        "init": {"policy": init["policy"], "locations": None if locations is None else locations.tolist()},
        "output": out,
    }
    return RunConfig(gm, optimizer, out, Path(base_dir), raw)


def serialize_config(config: RunConfig) -> str:
    """Inverse of :func:`parse_config` (floats keep their shortest round-trip form)."""
    return json.dumps(copy.deepcopy(config.raw), indent=2) + "\n"


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    return parse_config(path.read_text(encoding="utf-8"), base_dir=path.parent)
