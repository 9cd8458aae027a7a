import json
import math

import numpy as np
import pytest

from pcd_sampler import dirac_moments
from pcd_sampler.cli import main, read_samples_csv, run
from conftest import normal_cdf
from pcd_sampler.config import ConfigError, load_config, parse_config, serialize_config

STD_NORMAL_2D = {
    "format_version": 1,
    "density": {
        "type": "gaussian_mixture",
        "weights": [1.0],
        "means": [[0.0, 0.0]],
        "covariances": [[[1.0, 0.0], [0.0, 1.0]]],
    },
    "L": 50,
    "optimizer": {"seed": 7},
}


def _write(tmp_path, doc, name="run.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc), encoding="utf-8")
    return path


def test_minimal_config_gets_defaults():
    cfg = parse_config('{"density": {"type": "gaussian_mixture", "weights": [1], "means": [0], "covariances": [1]}, "L": 5}')
    assert cfg.density.dimension == 1
    assert cfg.optimizer.n_samples == 5
    assert cfg.optimizer.step_size == 0.5
    assert cfg.optimizer.max_iterations == 5000
    assert cfg.optimizer.threshold is None and cfg.optimizer.directions is None
    assert cfg.output["samples"] == "samples.csv"


def test_round_trip_preserves_values():
    doc = {
        "density": {
            "type": "gaussian_mixture",
            "weights": [0.5, 0.5],
            "means": [[0.0, 0.0], [0.0, 0.0]],
            "covariances": [[[3.0, 2.0], [2.0, 3.0]], [[3.0, -2.0], [-2.0, 3.0]]],
        },
        "L": 100,
        "optimizer": {"step_size": 0.3, "seed": 12345678901234567890},
    }
    first = parse_config(json.dumps(doc))
    second = parse_config(serialize_config(first))
    assert serialize_config(second) == serialize_config(first)
    np.testing.assert_array_equal(second.density.covariances, first.density.covariances)
    assert second.optimizer == first.optimizer


def test_non_positive_definite_covariance_rejected():
    doc = json.loads(json.dumps(STD_NORMAL_2D))
    doc["density"]["covariances"] = [[[1.0, 2.0], [2.0, 1.0]]]
    with pytest.raises(ConfigError, match=r"density\.covariances\[0\]: not positive definite"):
        parse_config(json.dumps(doc))


@pytest.mark.parametrize(
    "mutate, message",
    [
        (lambda d: d["density"].update(weights=[0.7]), "density.weights"),
        (lambda d: d.update(L=0), "L: must be at least 1"),
        (lambda d: d["optimizer"].update(scheme="spiral"), "optimizer.scheme"),
        (lambda d: d["optimizer"].update(step_size=2.0), "step_size"),
        (lambda d: d["optimizer"].update(colour=1), "unknown field"),
        (lambda d: d.update(format_version=3), "format_version"),
        (lambda d: d.update(init={"policy": "explicit", "locations": [[0.0]]}), "init.locations"),
    ],
)
def test_validation_errors_name_the_field(mutate, message):
    doc = json.loads(json.dumps(STD_NORMAL_2D))
    mutate(doc)
    with pytest.raises(ConfigError, match=message):
        parse_config(json.dumps(doc))


def test_syntax_error_reports_location():
    with pytest.raises(ConfigError, match="line 3, column"):
        parse_config('{\n  "L": 5,\n  "density": [,\n}')


def test_run_writes_samples(tmp_path):
    cfg = load_config(_write(tmp_path, STD_NORMAL_2D))
    assert run(cfg) == 0
    lines = (tmp_path / "samples.csv").read_text().splitlines()
    assert len(lines) == 50
    assert all(len(line.split(",")) == 3 for line in lines)
    diag = json.loads((tmp_path / "diagnostics.json").read_text())
    assert diag["converged"] is True
    assert diag["distance_final"] < diag["distance_initial"]
    assert diag["moments"]["covariance_rel_frobenius_error"] < 0.25


def test_run_is_byte_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    a.mkdir()
    b.mkdir()
    assert main(["run", str(_write(a, STD_NORMAL_2D))]) == 0
    assert main(["run", str(_write(b, STD_NORMAL_2D))]) == 0
    assert (a / "samples.csv").read_bytes() == (b / "samples.csv").read_bytes()
    assert (a / "diagnostics.json").read_bytes() == (b / "diagnostics.json").read_bytes()


def test_forced_non_convergence_exit_code(tmp_path):
    doc = json.loads(json.dumps(STD_NORMAL_2D))
    doc["optimizer"]["max_iterations"] = 1
    assert main(["run", str(_write(tmp_path, doc))]) == 2
    assert json.loads((tmp_path / "diagnostics.json").read_text())["converged"] is False
    assert len((tmp_path / "samples.csv").read_text().splitlines()) == 50


def test_io_failure_exit_code(tmp_path, capsys):
    doc = json.loads(json.dumps(STD_NORMAL_2D))
    doc["output"] = {"samples": "missing-dir/samples.csv"}
    assert main(["run", str(_write(tmp_path, doc))]) == 1
    assert "error" in capsys.readouterr().err


def test_bad_config_exit_code(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert main(["run", str(path)]) == 1
    assert "line 1" in capsys.readouterr().err
    assert main(["run", str(tmp_path / "nope.json")]) == 1


def test_samples_csv_round_trip(tmp_path):
    cfg = load_config(_write(tmp_path, STD_NORMAL_2D))
    run(cfg)
    dm = read_samples_csv(tmp_path / "samples.csv")
    diag = json.loads((tmp_path / "diagnostics.json").read_text())
    mean, cov = dirac_moments(dm)
    np.testing.assert_allclose(mean, diag["moments"]["samples_mean"], atol=1e-9)
    np.testing.assert_allclose(cov, diag["moments"]["samples_covariance"], atol=1e-9)


def test_plot_data_tables(tmp_path):
    doc = json.loads(json.dumps(STD_NORMAL_2D))
    doc["output"] = {"emit_plot_data": True, "plot_direction": [1.0, 1.0]}
    assert main(["run", str(_write(tmp_path, doc))]) == 0
    cdf = np.loadtxt(tmp_path / "plot" / "projected_cdf.dat")
    assert cdf.shape[1] == 3
    assert np.all(np.diff(cdf[:, 1]) >= 0) and np.all(np.diff(cdf[:, 2]) >= 0)
    dm = read_samples_csv(tmp_path / "samples.csv")
    r = (dm.locations[0] + dm.locations[1]) / math.sqrt(2)
    np.testing.assert_allclose(cdf[:, 1], [normal_cdf(t) for t in cdf[:, 0]], atol=1e-14)
    np.testing.assert_allclose(cdf[:, 2], [np.sum(r <= t) / 50 for t in cdf[:, 0]], atol=1e-12)
    assert np.loadtxt(tmp_path / "plot" / "scatter.dat").shape == (50, 3)
    proj = np.loadtxt(tmp_path / "plot" / "samples_projected.dat")
    np.testing.assert_allclose(proj[:, 2], (2 * np.arange(1, 51) - 1) / 100, atol=1e-12)
    assert np.loadtxt(tmp_path / "plot" / "convergence.dat").ndim == 2


def test_solve1d_command(capsys):
    assert main(["solve1d", "--normal", "3"]) == 0
    values = [float(v) for v in capsys.readouterr().out.split()]
    np.testing.assert_allclose(values, [-0.96742, 0.0, 0.96742], atol=1e-5)


def test_distance_command(tmp_path, capsys):
    cfg_path = _write(tmp_path, STD_NORMAL_2D)
    (tmp_path / "one.csv").write_text("0.0,0.0,1.0\n")
    assert main(["distance", str(cfg_path), str(tmp_path / "one.csv")]) == 0
    value = float(capsys.readouterr().out)
    assert value == pytest.approx((math.sqrt(2) - 1) / math.sqrt(math.pi), abs=1e-10)
    (tmp_path / "bad.csv").write_text("0.0,1.0\n")
    assert main(["distance", str(cfg_path), str(tmp_path / "bad.csv")]) == 1


def test_thread_environment_override(tmp_path, monkeypatch):
    a, b = tmp_path / "a", tmp_path / "b"
    a.mkdir()
    b.mkdir()
    assert main(["run", str(_write(a, STD_NORMAL_2D))]) == 0
    monkeypatch.setenv("PCD_SAMPLER_THREADS", "3")
    assert main(["run", str(_write(b, STD_NORMAL_2D))]) == 0
    assert (a / "samples.csv").read_bytes() == (b / "samples.csv").read_bytes()


def test_explicit_init_from_config(tmp_path):
    doc = {
        "density": {"type": "gaussian_mixture", "weights": [1.0], "means": [[0.0]], "covariances": [[[1.0]]]},
        "L": 4,
        "init": {"policy": "explicit", "locations": [-2.0, -1.0, 1.0, 2.0]},
        "optimizer": {"step_size": 1.0, "threshold": 1e-12},
    }
    assert main(["run", str(_write(tmp_path, doc))]) == 0
    dm = read_samples_csv(tmp_path / "samples.csv")
    np.testing.assert_allclose(dm.locations[0], [-1.1503493803760079, -0.3186393639643752, 0.3186393639643752, 1.1503493803760079], atol=1e-10)
