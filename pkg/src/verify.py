"""
Suítes de equivalência contra o oráculo de Fock (subcomando `verify`).

quick: funções geradoras x oráculo para g em {0.25, 0.5}, eta em {0.08, 1},
       paridade e normalização.
full:  quick + critério micro-macro (com a componente y pela evolução
       explícita), mistura arauta e covariância de fase.

tolerance_scale multiplica todas as tolerâncias (gancho de teste: um valor
<= 0 força falhas com o nome da verificação).
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Tuple

import numpy as np

from amplifier import GainParams, LossChannel, certified_distributions, photon_distribution
from detection import ThresholdDetector, joint_stats
from oracle import (binomial_loss, equatorial_witness_term, phase_covariance_check, squeezed_number_state,
                    superposition_detection, witness_oracle)
from witness import witness_closed_form

log = logging.getLogger(__name__)

QUICK_GAINS = (0.25, 0.5)
QUICK_ETAS = (0.08, 1.0)
M_COMPARE = 100
ORACLE_TRUNC = 4 * M_COMPARE


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    deviation: float
    tolerance: float


def _oracle_distribution(gain: GainParams, seed: int, eta: float) -> np.ndarray:
    state = squeezed_number_state(gain, seed, ORACLE_TRUNC)
    return binomial_loss(state.number_distribution(), eta).probs


def _equivalence(g: float, eta: float, seed: int) -> float:
    gain, loss = GainParams(g), LossChannel(eta)
    genfunc = photon_distribution(seed, gain, loss, M_COMPARE).clamped()
    oracle = _oracle_distribution(gain, seed, eta)[: M_COMPARE + 1]
    return float(np.max(np.abs(genfunc - oracle)))


def _parity(g: float, seed: int) -> float:
    dist = photon_distribution(seed, GainParams(g), LossChannel(1.0), 2 * M_COMPARE)
    wrong = dist.probs[1 - seed::2]
    return float(np.max(np.abs(wrong))) if wrong.size else 0.0


def _normalization(g: float, eta: float) -> float:
    d0, d1 = certified_distributions(GainParams(g), LossChannel(eta), 1e-12)
    return max(abs(1.0 - np.sum(d0.probs)), abs(1.0 - np.sum(d1.probs)))


def _witness(g: float, eta: float) -> float:
    gain, loss = GainParams(g), LossChannel(eta)
    a = witness_closed_form(gain, loss)
    b = witness_oracle(gain, loss)
    return max(abs(a.jz_sz - b.jz_sz), abs(a.jx_sx - b.jx_sx), abs(a.jy_sy - b.jy_sy),
               abs(a.n_a - b.n_a), abs(a.margin - b.margin))


def _witness_y(g: float, eta: float) -> float:
    gain, loss = GainParams(g), LossChannel(eta)
    return abs(equatorial_witness_term(gain, loss, math.pi / 4) - witness_closed_form(gain, loss).jy_sy)


def _mixture(g: float, mix_angle: float) -> float:
    gain = GainParams(g)
    detector = ThresholdDetector()
    pure = joint_stats(gain, detector)
    mixed = superposition_detection(mix_angle, gain, detector)
    w = math.cos(mix_angle) ** 2
    expected = (
        w * pure.p_yn + (1 - w) * pure.p_ny,
        w * pure.p_ny + (1 - w) * pure.p_yn,
        pure.p_yy,
        pure.p_nn,
    )
    got = (mixed.p_yn, mixed.p_ny, mixed.p_yy, mixed.p_nn)
    return max(abs(x - y) for x, y in zip(expected, got))


def _phase(g: float, phi: float) -> float:
    return phase_covariance_check(GainParams(g), phi)


def _suite(level: str) -> List[Tuple[str, Callable[[], float], float]]:
    checks = []
    for g in QUICK_GAINS:
        for eta in QUICK_ETAS:
            for seed in (0, 1):
                checks.append((f"equivalencia g={g} eta={eta} |A{seed}>", lambda g=g, eta=eta, s=seed: _equivalence(g, eta, s), 1e-10))
            checks.append((f"normalizacao g={g} eta={eta}", lambda g=g, eta=eta: _normalization(g, eta), 1e-12))
        for seed in (0, 1):
            checks.append((f"paridade g={g} |A{seed}>", lambda g=g, s=seed: _parity(g, s), 1e-14))

    if level == "full":
        for g, eta in ((0.5, 0.08), (1.0, 0.5), (1.25, 0.5)):
            checks.append((f"testemunha g={g} eta={eta}", lambda g=g, eta=eta: _witness(g, eta), 1e-8))
        checks.append(("componente y g=0.3 eta=0.5", lambda: _witness_y(0.3, 0.5), 1e-9))
        checks.append(("mistura arauta g=0.75 theta_b=pi/4", lambda: _mixture(0.75, math.pi / 4), 1e-9))
        for phi in (0.0, 1.1):
            checks.append((f"covariancia de fase g=0.3 phi={phi}", lambda phi=phi: _phase(0.3, phi), 1e-6))
    return checks


def run_verify(level: str = "quick", tolerance_scale: float = 1.0) -> List[CheckResult]:
    if level not in ("quick", "full"):
        raise ValueError(f"Nível desconhecido: {level}")

    results = []
    for name, check, tol in _suite(level):
        tol = tol * tolerance_scale
        deviation = float(check())
        passed = bool(deviation <= tol)
        results.append(CheckResult(name=name, passed=passed, deviation=deviation, tolerance=tol))
        if passed:
            log.debug("ok   %s (desvio %.2e <= %.0e)", name, deviation, tol)
        else:
            log.error("FALHA %s (desvio %.2e > %.2e)", name, deviation, tol)
    return results
