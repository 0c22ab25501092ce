import math

import numpy as np
import pytest

from amplifier import GainParams, gain_from_mean_photons
from bell import DEFAULT_SETTINGS, chsh_value, correlation, outcomes, simulate_trials
from detection import DetectionStats, ThresholdDetector, joint_stats
from oracle import superposition_detection


def _stats(p_yn, p_ny):
    eps = p_yn + p_ny
    return DetectionStats(p_yn=p_yn, p_ny=p_ny, p_yy=0.0, p_nn=1.0 - eps, epsilon=eps,
                          visibility=(p_yn - p_ny) / eps if eps > 0 else None, mean_N=1.0)


IDEAL = _stats(1.0, 0.0)


@pytest.mark.parametrize("delta, vis, expected", [
    (0.0, 1.0, -1.0),
    (math.pi / 2, 0.8, 0.0),
    (math.pi, 0.5, 0.5),
])
def test_correlation(delta, vis, expected):
    assert correlation(delta, vis) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("vis, expected", [
    (1 / math.sqrt(2), 2.0),
    (1.0, 2.82843),
    (0.75, 2.12132),
])
def test_chsh_value(vis, expected):
    assert chsh_value(vis) == pytest.approx(expected, abs=1e-5)


def test_chsh_value_at_classical_bound_is_exact():
    assert chsh_value(1 / math.sqrt(2)) == pytest.approx(2.0, abs=1e-15)


@pytest.mark.parametrize("vis", [1.5, -1.01, None, float("nan")])
def test_invalid_visibility(vis):
    with pytest.raises(ValueError):
        chsh_value(vis)


def test_chsh_combination_of_correlators():
    a0, a1, b0, b1 = DEFAULT_SETTINGS
    v = 0.9
    s = correlation(a0 - b0, v) + correlation(a0 - b1, v) + correlation(a1 - b0, v) - correlation(a1 - b1, v)
    assert abs(s) == pytest.approx(chsh_value(v), rel=1e-14)


def test_ideal_singlet_reaches_tsirelson():
    est = simulate_trials(1_000_000, IDEAL, rng_seed=7)
    assert est.conclusive_rate == 1.0
    assert abs(est.s_value - 2 * math.sqrt(2)) < 5 * est.std_error
    assert np.allclose(est.correlations, [-math.cos(math.pi / 4)] * 3 + [-math.cos(3 * math.pi / 4)], atol=0.01)


def test_fixed_seed_is_reproducible():
    stats = _stats(0.3, 0.05)
    a = simulate_trials(200_000, stats, rng_seed=11)
    b = simulate_trials(200_000, stats, rng_seed=11)
    assert a == b


def test_result_is_independent_of_worker_count():
    stats = _stats(0.3, 0.05)
    serial = simulate_trials(300_000, stats, rng_seed=3, workers=1)
    parallel = simulate_trials(300_000, stats, rng_seed=3, workers=4)
    assert serial == parallel


def test_different_seeds_differ():
    stats = _stats(0.3, 0.05)
    assert simulate_trials(100_000, stats, rng_seed=1) != simulate_trials(100_000, stats, rng_seed=2)


def test_no_conclusive_events(caplog):
    with caplog.at_level("WARNING"):
        est = simulate_trials(1000, _stats(0.0, 0.0))
    assert math.isnan(est.s_value)
    assert est.n_conclusive == 0
    assert est.conclusive_rate == 0.0
    assert "sem eventos conclusivos" in caplog.text


@pytest.mark.parametrize("n, settings", [(0, DEFAULT_SETTINGS), (10, (0.0, 1.0, 2.0))])
def test_invalid_runs(n, settings):
    with pytest.raises(ValueError):
        simulate_trials(n, IDEAL, settings)


def test_outcomes_agree_with_counts():
    stats = _stats(0.4, 0.1)
    events = outcomes(5000, stats, rng_seed=5)
    est = simulate_trials(5000, stats, rng_seed=5)
    assert len(events) == 5000
    assert [e.trial_id for e in events] == list(range(5000))
    conclusive = [e for e in events if e.result_a != "inconclusive"]
    assert len(conclusive) == est.n_conclusive
    assert {e.result_b for e in events} <= {"plus", "minus"}
    assert {e.basis_a for e in events} <= set(DEFAULT_SETTINGS[:2])
    assert {e.basis_b for e in events} <= set(DEFAULT_SETTINGS[2:])


@pytest.mark.slow
def test_monte_carlo_at_fig2_peak():
    stats = joint_stats(gain_from_mean_photons(288.0))
    est = simulate_trials(1_000_000, stats, rng_seed=0)
    assert est.conclusive_rate == pytest.approx(0.61, abs=0.005)
    assert abs(est.s_value - chsh_value(stats.visibility)) < 5 * est.std_error
    assert chsh_value(stats.visibility) > 2.0
    assert simulate_trials(1_000_000, stats, rng_seed=0) == est


@pytest.mark.parametrize("delta", [0.0, math.pi / 3, math.pi / 2, math.pi])
@pytest.mark.parametrize("detector", [ThresholdDetector(3, 0.5), ThresholdDetector(2, 0.3)])
def test_correlation_matches_heralded_mixtures(delta, detector):
    """
    b = plus arauta cos^2(delta/2) Phi_perp + sin^2(delta/2) Phi; b = minus, o
    complemento. Com eps igual nos dois casos, E = (V_plus - V_minus) / 2.
    """
    gain = GainParams(0.75)
    vis = joint_stats(gain, detector).visibility
    b_plus = superposition_detection(math.pi / 2 - delta / 2, gain, detector)
    b_minus = superposition_detection(delta / 2, gain, detector)
    assert b_plus.epsilon == pytest.approx(b_minus.epsilon, abs=1e-12)
    derived = 0.5 * (b_plus.visibility - b_minus.visibility)
    assert correlation(delta, vis) == pytest.approx(derived, abs=1e-6)
