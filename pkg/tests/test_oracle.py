import math

import numpy as np
import pytest

from amplifier import GainParams, LossChannel, mean_photons, photon_distribution
from detection import ThresholdDetector, joint_stats
from oracle import (binomial_loss, equatorial_distribution, equatorial_witness_term, loss_kernel, phase_covariance_check,
                    squeezed_number_state, superposition_detection, threshold_outcomes, two_mode_loss,
                    two_mode_squeezed_photon)
from utils import TruncationError
from witness import witness_closed_form


def test_no_gain_is_identity():
    state = squeezed_number_state(GainParams(0.0), 0, 10)
    assert np.allclose(state.amps, np.eye(11)[0])
    assert state.trunc_loss == 0.0


def test_seeded_state_mean():
    state = squeezed_number_state(GainParams(1.0), 1)
    assert state.mean() == pytest.approx(3 * math.sinh(1.0) ** 2 + 1, abs=1e-9)
    assert state.mean() == pytest.approx(5.14329, abs=1e-5)


def test_squeezed_vacuum_amplitudes():
    g = math.atanh(0.5)
    p = squeezed_number_state(GainParams(g), 0, 40).number_distribution()
    assert p[0] == pytest.approx(1 / math.cosh(g), abs=1e-14)
    assert p[2] == pytest.approx(0.10825, abs=1e-5)
    assert p[1] == 0.0


@pytest.mark.parametrize("n0", [0, 1])
def test_parity_support(n0):
    p = squeezed_number_state(GainParams(0.8), n0).number_distribution()
    assert np.all(p[1 - n0::2] == 0.0)


def test_explicit_truncation_too_small_fails():
    with pytest.raises(TruncationError):
        squeezed_number_state(GainParams(2.0), 1, 20)


def test_explicit_truncation_warns_between_tolerances(caplog):
    """Perda entre 1e-12 e 1e-9: aceita com aviso."""
    gain = GainParams(0.5)
    tail = 1.0 - np.cumsum(squeezed_number_state(gain, 0, 400).number_distribution())
    n = int(np.argmax((tail > 2e-12) & (tail < 5e-10)))
    with caplog.at_level("WARNING"):
        state = squeezed_number_state(gain, 0, n)
    assert 1e-12 < state.trunc_loss <= 1e-9
    assert "Perda de truncamento" in caplog.text


def test_loss_of_one_photon():
    out = binomial_loss(np.array([0.0, 1.0]), 0.08)
    assert np.allclose(out.probs, [0.92, 0.08])


def test_unit_transmission_is_identity():
    p = np.array([0.1, 0.2, 0.3, 0.4])
    assert np.array_equal(binomial_loss(p, 1.0).probs, p)
    assert np.array_equal(loss_kernel(3, 1.0), np.eye(4))


@pytest.mark.parametrize("eta", [0.08, 0.5])
def test_loss_kernel_is_column_stochastic(eta):
    K = loss_kernel(30, eta)
    assert np.allclose(K.sum(axis=0), 1.0)
    assert np.allclose(np.triu(K), K)


def test_losses_compose():
    p = squeezed_number_state(GainParams(0.7), 1, 200).number_distribution()
    twice = binomial_loss(binomial_loss(p, 0.5), 0.16)
    once = binomial_loss(p, 0.08)
    assert np.allclose(twice.probs, once.probs, atol=1e-15)
    assert twice.eta == pytest.approx(0.08)


@pytest.mark.parametrize("g", [0.25, 0.5, 1.0])
@pytest.mark.parametrize("eta", [0.08, 0.5, 1.0])
@pytest.mark.parametrize("seed", [0, 1])
def test_generating_functions_match_oracle(g, eta, seed):
    gain = GainParams(g)
    genfunc = photon_distribution(seed, gain, LossChannel(eta), 100).clamped()
    oracle = binomial_loss(squeezed_number_state(gain, seed, 400).number_distribution(), eta).probs[:101]
    assert np.max(np.abs(genfunc - oracle)) < 1e-10


def test_oracle_mean_after_loss():
    gain = GainParams(0.9)
    out = binomial_loss(squeezed_number_state(gain, 1).number_distribution(), 0.3)
    assert out.mean == pytest.approx(mean_photons(1, gain, LossChannel(0.3)), rel=1e-10)


def test_two_mode_state_conserves_difference():
    state = two_mode_squeezed_photon(GainParams(0.6))
    p = state.number_distribution()
    n_h, n_v = np.nonzero(p)
    assert np.all(n_h - n_v == 1)
    assert math.fsum(p.ravel().tolist()) == pytest.approx(1.0, abs=1e-12)


def test_two_mode_loss_factorizes():
    gain = GainParams(0.6)
    a = squeezed_number_state(gain, 1, 120).number_distribution()
    b = squeezed_number_state(gain, 0, 120).number_distribution()
    joint = two_mode_loss(np.outer(a, b), 0.3)
    expected = np.outer(binomial_loss(a, 0.3).probs, binomial_loss(b, 0.3).probs)
    assert np.allclose(joint, expected, atol=1e-15)


def test_threshold_outcomes_partition():
    p2 = np.full((5, 5), 1.0 / 25)
    outcomes = threshold_outcomes(p2, 2)
    assert outcomes == pytest.approx((6 / 25, 6 / 25, 9 / 25, 4 / 25))


@pytest.mark.parametrize("mix_angle, mirrored", [(0.0, False), (math.pi / 2, True)])
def test_pure_heralded_states(mix_angle, mirrored):
    gain = GainParams(0.9)
    pure = joint_stats(gain, ThresholdDetector(3, 0.5))
    mixed = superposition_detection(mix_angle, gain, ThresholdDetector(3, 0.5))
    p_yn, p_ny = (pure.p_ny, pure.p_yn) if mirrored else (pure.p_yn, pure.p_ny)
    assert mixed.p_yn == pytest.approx(p_yn, abs=1e-9)
    assert mixed.p_ny == pytest.approx(p_ny, abs=1e-9)
    assert mixed.p_yy == pytest.approx(pure.p_yy, abs=1e-9)
    assert mixed.p_nn == pytest.approx(pure.p_nn, abs=1e-9)


@pytest.mark.parametrize("extra", [1.0, 0.5])
def test_equal_superposition_is_a_mixture(extra):
    gain = GainParams(0.75)
    pure = joint_stats(gain, ThresholdDetector(), extra)
    mixed = superposition_detection(math.pi / 4, gain, ThresholdDetector(), extra_transmission=extra)
    half = 0.5 * (pure.p_yn + pure.p_ny)
    assert mixed.p_yn == pytest.approx(half, abs=1e-9)
    assert mixed.p_ny == pytest.approx(half, abs=1e-9)
    assert mixed.p_yy == pytest.approx(pure.p_yy, abs=1e-9)
    assert mixed.p_nn == pytest.approx(pure.p_nn, abs=1e-9)
    assert mixed.epsilon == pytest.approx(pure.epsilon, abs=1e-9)


def test_phase_covariance_without_gain():
    assert phase_covariance_check(GainParams(0.0), 0.7) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("phi", [0.0, 1.1])
def test_phase_covariance(phi):
    assert phase_covariance_check(GainParams(0.3), phi) < 1e-6


def test_phase_covariance_between_bases():
    p10_a, p01_a, _ = equatorial_distribution(GainParams(0.3), 0.0)
    p10_b, p01_b, _ = equatorial_distribution(GainParams(0.3), 1.1)
    assert np.max(np.abs(p10_a - p10_b)) < 1e-6
    assert np.max(np.abs(p01_a - p01_b)) < 1e-6


def test_phase_covariance_gain_limit():
    with pytest.raises(ValueError):
        phase_covariance_check(GainParams(0.5), 0.0)


@pytest.mark.parametrize("g", [0.0, 0.2, 0.35])
@pytest.mark.parametrize("eta", [0.08, 0.5, 1.0])
def test_equatorial_witness_components_from_explicit_evolution(g, eta):
    gain, loss = GainParams(g), LossChannel(eta)
    expected = witness_closed_form(gain, loss)
    assert equatorial_witness_term(gain, loss, 0.0) == pytest.approx(expected.jx_sx, abs=1e-9)
    assert equatorial_witness_term(gain, loss, math.pi / 4) == pytest.approx(expected.jy_sy, abs=1e-9)


def test_equatorial_witness_term_gain_limit():
    with pytest.raises(ValueError):
        equatorial_witness_term(GainParams(0.5), LossChannel(0.5), math.pi / 4)
