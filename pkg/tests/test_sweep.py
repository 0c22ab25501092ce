import math

import numpy as np
import pytest

from amplifier import GainParams, total_mean_photons
from sweep import build_sweep_config, geometric_gain_grid, run_sweep
from utils import ConfigError


def test_geometric_grid_in_mean_photons():
    grid = geometric_gain_grid(2.0, 2.0e4, 5)
    n = [total_mean_photons(GainParams(g)) for g in grid]
    assert n == pytest.approx([2.0, 20.0, 200.0, 2000.0, 20000.0], rel=1e-12)


def test_defaults():
    cfg = build_sweep_config({})
    assert len(cfg.g_grid) == 200
    assert cfg.theta == 7 and cfg.eta_eye == 0.08
    assert cfg.extra_transmissions == (1.0, 0.5, 0.25)
    assert cfg.fmt == "csv" and cfg.output is None


def test_explicit_gains_take_precedence():
    cfg = build_sweep_config({"g": [0.0, 1.0], "points": 3, "extra_loss": 0.5})
    assert cfg.g_grid == (0.0, 1.0)
    assert cfg.extra_transmissions == (0.5,)


@pytest.mark.parametrize("config", [
    {"g": []},
    {"g": [-1.0]},
    {"extra_loss": [1.0, 0.0]},
    {"extra_loss": 1.5},
    {"eta": 0.0},
    {"theta": 0},
    {"tail_tol": 1.0},
    {"format": "xml"},
    {"points": 0},
    {"n_mean_min": 0.5},
    {"theta": "sete"},
    {"theta": 7.9},
    {"workers": 1.5},
    {"m_max_cap": 0},
])
def test_invalid_configs(config):
    with pytest.raises(ConfigError):
        build_sweep_config(config)


def test_single_point_without_gain():
    results = run_sweep(build_sweep_config({"g": 0.0, "extra_loss": 1.0}))
    assert not results["failed"]
    (row,) = results["rows"]
    assert row["epsilon"] == 0.0
    assert row["V"] is None
    (summary,) = results["summary"]
    assert summary["V_min"] is None
    assert summary["epsilon_max"] == 0.0


def test_rows_follow_grid_order():
    cfg = build_sweep_config({"g": [2.5, 1.5, 2.0], "extra_loss": [1.0, 0.5], "workers": 3})
    results = run_sweep(cfg)
    assert [r["g"] for r in results["rows"]] == [2.5, 1.5, 2.0, 2.5, 1.5, 2.0]
    assert [r["eta_total"] for r in results["rows"]] == pytest.approx([0.08] * 3 + [0.04] * 3)
    assert [s["extra_transmission"] for s in results["summary"]] == [1.0, 0.5]


def test_parallel_rows_equal_serial_rows():
    base = {"g": [1.8, 2.2], "extra_loss": 1.0}
    serial = run_sweep(build_sweep_config({**base, "workers": 1}))
    parallel = run_sweep(build_sweep_config({**base, "workers": 2}))
    assert serial["rows"] == parallel["rows"]


def test_cap_failure_is_reported():
    cfg = build_sweep_config({"g": [1.0, 5.0], "eta": 1.0, "extra_loss": 1.0, "m_max_cap": 1024})
    results = run_sweep(cfg)
    assert results["failed"]
    assert "Falha numérica" in results["check"]
    assert results["rows"] == []


def test_peak_refinement_brackets_grid_maximum():
    results = run_sweep(build_sweep_config({"n_mean_min": 100.0, "n_mean_max": 800.0, "points": 9,
                                            "extra_loss": 1.0}))
    (summary,) = results["summary"]
    grid_best = max(r["epsilon"] for r in results["rows"])
    assert summary["epsilon_max"] >= grid_best
    assert 100.0 < summary["N_mean_at_max"] < 800.0


@pytest.mark.slow
def test_fig2_acceptance():
    results = run_sweep(build_sweep_config({}))
    assert not results["failed"]
    by_extra = {s["extra_transmission"]: s for s in results["summary"]}

    peak = by_extra[1.0]
    assert peak["epsilon_max"] == pytest.approx(0.61, abs=0.01)
    assert peak["N_mean_at_max"] == pytest.approx(288.0, rel=0.05)

    for extra in (0.5, 0.25):
        s = by_extra[extra]
        assert abs(s["epsilon_max"] - peak["epsilon_max"]) <= 0.01
        assert s["N_mean_at_max"] > peak["N_mean_at_max"]

    rows = [r for r in results["rows"] if r["eta_total"] == pytest.approx(0.08) and 10.0 <= r["N_mean"] <= 1.0e4]
    vis = np.array([r["V"] for r in rows])
    assert vis.min() >= 1 / math.sqrt(2) - 1e-6
    # mergulho local: V não é monótona no intervalo
    steps = np.sign(np.diff(vis))
    assert np.any(steps > 0) and np.any(steps < 0)
