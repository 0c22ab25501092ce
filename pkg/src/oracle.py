"""
Oráculo de força bruta em espaço de Fock truncado.

Lento e confiável: amplitudes explícitas dos estados comprimidos, perdas
binomiais explícitas, POVMs de limiar, estados micro-macro de dois modos e
evolução numérica do Hamiltoniano de conversão paramétrica. Usado apenas
nos testes e em `verify`; para ganhos altos o caminho das funções geradoras
(amplifier.py) é o de referência.

Memória: operações de dois modos guardam matrizes (n_trunc+1)^2.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply
from scipy.special import gammaln
from scipy.stats import binom

from amplifier import GainParams, LossChannel, PhotonNumberDistribution
from constants import (EPS_UNDEFINED, ORACLE_MIN_TRUNC, ORACLE_TRUNC_FAIL, ORACLE_TRUNC_TOL, PHASE_CHECK_TRUNC,
                       WITNESS_ORACLE_G_MAX)
from detection import DetectionStats, ThresholdDetector, compose_transmission
from utils import TruncationError, check_transmission, compensated_sum
from witness import WitnessReport, make_report

log = logging.getLogger(__name__)

MAX_TRUNC = 1 << 15
DENSE_KERNEL_MAX = 4096


@dataclass(frozen=True)
class FockVector:
    """Amplitudes em |n> (um modo, shape (N+1,)) ou |n, n_perp> (dois modos, shape (N+1, N+1))."""

    amps: np.ndarray
    n_trunc: int
    trunc_loss: float

    def number_distribution(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def mean(self) -> float:
        if self.amps.ndim != 1:
            raise ValueError("mean() só para estados de um modo")
        return compensated_sum(np.arange(self.n_trunc + 1) * self.number_distribution())


def default_trunc(gain: GainParams) -> int:
    return max(ORACLE_MIN_TRUNC, math.ceil(12.0 * (3.0 * gain.sinh2 + 1.0)))


def _with_truncation(builder: Callable[[int], FockVector], gain: GainParams,
                     n_trunc: Optional[int]) -> FockVector:
    """
    n_trunc explícito: falha se a perda de truncamento passar de 1e-9.
    n_trunc = None: parte de default_trunc e dobra até a perda ficar < 1e-12.
    """
    if n_trunc is not None:
        state = builder(int(n_trunc))
        if state.trunc_loss > ORACLE_TRUNC_FAIL:
            raise TruncationError(
                f"Perda de truncamento {state.trunc_loss:.2e} > {ORACLE_TRUNC_FAIL:.0e} com n_trunc={n_trunc} (g={gain.g:.4g})"
            )
        if state.trunc_loss > ORACLE_TRUNC_TOL:
            log.warning("Perda de truncamento %.2e acima de %.0e (n_trunc=%d)", state.trunc_loss, ORACLE_TRUNC_TOL, n_trunc)
        return state

    n = default_trunc(gain)
    while n <= MAX_TRUNC:
        state = builder(n)
        if state.trunc_loss < ORACLE_TRUNC_TOL:
            return state
        n *= 2
    raise TruncationError(f"Nenhum n_trunc <= {MAX_TRUNC} atinge perda < {ORACLE_TRUNC_TOL:.0e} (g={gain.g:.4g})")


def _squeezed_amplitudes(g: float, n0: int, N: int) -> FockVector:
    t = math.tanh(g)
    c = math.cosh(g)
    amps = np.zeros(N + 1)
    # índices 2k + n0 <= N
    k = np.arange((N - n0) // 2 + 1, dtype=float)
    if n0 == 0:
        log_mag = 0.5 * gammaln(2 * k + 1) - k * math.log(2.0) - gammaln(k + 1)
        amps[0::2] = np.power(t, k) * np.exp(log_mag) / math.sqrt(c)
    else:
        log_mag = 0.5 * gammaln(2 * k + 2) - k * math.log(2.0) - gammaln(k + 1)
        amps[1::2] = np.power(t, k) * np.exp(log_mag) / c ** 1.5
    loss = max(0.0, 1.0 - compensated_sum(amps ** 2))
    return FockVector(amps=amps.astype(complex), n_trunc=N, trunc_loss=loss)


def squeezed_number_state(gain: GainParams, n0: int, n_trunc: Optional[int] = None) -> FockVector:
    """
    U|n0> com U = exp(tanh g a^+2 / 2) exp(-ln(cosh g)(a^+ a + 1/2)) exp(-tanh g a^2 / 2):
        n0 = 0: c_2k   = tanh^k g sqrt((2k)!)   / (2^k k!) / sqrt(cosh g)
        n0 = 1: c_2k+1 = tanh^k g sqrt((2k+1)!) / (2^k k!) / cosh^{3/2} g
    """
    if n0 not in (0, 1):
        raise ValueError(f"n0 deve ser 0 ou 1, recebido {n0}")
    return _with_truncation(lambda N: _squeezed_amplitudes(gain.g, n0, N), gain, n_trunc)


def _two_mode_amplitudes(g: float, N: int) -> FockVector:
    t = math.tanh(g)
    c2 = math.cosh(g) ** 2
    amps = np.zeros((N + 1, N + 1))
    k = np.arange(N, dtype=float)
    amps[np.arange(1, N + 1), np.arange(N)] = np.sqrt(k + 1.0) * np.power(t, k) / c2
    loss = max(0.0, 1.0 - compensated_sum(amps[np.arange(1, N + 1), np.arange(N)] ** 2))
    return FockVector(amps=amps.astype(complex), n_trunc=N, trunc_loss=loss)


def two_mode_squeezed_photon(gain: GainParams, n_trunc: Optional[int] = None) -> FockVector:
    """
    exp(g (a_H^+ a_V^+ - a_H a_V)) |1, 0>_HV = sum_k sqrt(k+1) tanh^k g / cosh^2 g |k+1, k>.
    n_H - n_V = 1 é conservado. O caso |0, 1> é a transposta.
    """
    return _with_truncation(lambda N: _two_mode_amplitudes(gain.g, N), gain, n_trunc)


def loss_kernel(n_trunc: int, eta: float) -> np.ndarray:
    """K[m, n] = C(n, m) eta^m (1 - eta)^(n - m): coluna-estocástica."""
    eta = check_transmission(eta)
    if eta == 1.0:
        return np.eye(n_trunc + 1)
    m = np.arange(n_trunc + 1)
    return binom.pmf(m[:, None], m[None, :], eta)


def _apply_loss(p: np.ndarray, eta: float) -> np.ndarray:
    N = p.size - 1
    if eta == 1.0:
        return p.copy()
    if N + 1 <= DENSE_KERNEL_MAX:
        return loss_kernel(N, eta) @ p
    out = np.zeros_like(p)
    for n in np.flatnonzero(p):
        out[: n + 1] += p[n] * binom.pmf(np.arange(n + 1), n, eta)
    return out


def binomial_loss(dist, eta: float) -> PhotonNumberDistribution:
    """
    Canal de perdas C_L com o modo de ambiente traçado:
        P_out(m) = sum_{n>=m} P_in(n) C(n,m) eta^m (1-eta)^(n-m)
    dist: PhotonNumberDistribution ou a diagonal |c_n|^2 de um FockVector.
    """
    eta = check_transmission(eta)
    if isinstance(dist, PhotonNumberDistribution):
        p_in = dist.clamped()
        g, seed = dist.g, dist.seed
        eta_out = eta * dist.eta if dist.eta is not None else eta
    else:
        p_in = np.asarray(dist, dtype=float)
        g, seed, eta_out = None, None, eta
    if p_in.ndim != 1:
        raise ValueError("binomial_loss espera uma distribuição de um modo")

    p_out = _apply_loss(p_in, eta)
    tail = max(0.0, 1.0 - compensated_sum(p_out))
    mean = compensated_sum(np.arange(p_out.size) * p_out)
    return PhotonNumberDistribution(probs=p_out, tail_bound=tail, mean=mean, g=g, eta=eta_out, seed=seed)


def two_mode_loss(p2: np.ndarray, eta: float) -> np.ndarray:
    """Perda independente (mesma transmissão) nos dois modos de uma distribuição conjunta."""
    K = loss_kernel(p2.shape[0] - 1, eta)
    return K @ p2 @ K.T


def threshold_outcomes(p2: np.ndarray, theta: int):
    """(p_yn, p_ny, p_yy, p_nn) de dois detectores de limiar sobre P(n_a, n_perp)."""
    yes = np.arange(p2.shape[0]) >= theta
    p_yn = compensated_sum(p2[np.ix_(yes, ~yes)])
    p_ny = compensated_sum(p2[np.ix_(~yes, yes)])
    p_yy = compensated_sum(p2[np.ix_(yes, yes)])
    p_nn = compensated_sum(p2[np.ix_(~yes, ~yes)])
    return p_yn, p_ny, p_yy, p_nn


def _seed_pair(gain: GainParams, n_trunc: Optional[int]):
    """|A1> e |A0> na mesma truncagem (a de |A1>, de cauda mais pesada)."""
    a1 = squeezed_number_state(gain, 1, n_trunc)
    a0 = squeezed_number_state(gain, 0, a1.n_trunc)
    return a1, a0


def superposition_detection(mix_angle: float, gain: GainParams,
                            detector: ThresholdDetector = ThresholdDetector(),
                            n_trunc: Optional[int] = None,
                            extra_transmission: float = 1.0) -> DetectionStats:
    """
    Estado arauto cos(t)|A1>|A0>_perp + sin(t)|A0>|A1>_perp construído
    explicitamente; perdas em cada modo e limiar theta nos dois olhos.
    Como |A0> vive em n par e |A1> em n ímpar, os termos cruzados somem e o
    resultado deve ser a mistura cos^2 stats(Phi) + sin^2 stats(Phi_perp).
    """
    a1, a0 = _seed_pair(gain, n_trunc)
    psi = math.cos(mix_angle) * np.outer(a1.amps, a0.amps) + math.sin(mix_angle) * np.outer(a0.amps, a1.amps)
    eta_total = compose_transmission([detector.eta_eye, extra_transmission])
    p2 = two_mode_loss(np.abs(psi) ** 2, eta_total)
    p_yn, p_ny, p_yy, p_nn = threshold_outcomes(p2, detector.theta)
    eps = p_yn + p_ny
    return DetectionStats(p_yn=p_yn, p_ny=p_ny, p_yy=p_yy, p_nn=p_nn, epsilon=eps,
                          visibility=(p_yn - p_ny) / eps if eps >= EPS_UNDEFINED else None,
                          mean_N=4.0 * gain.sinh2 + 1.0, g=gain.g, eta_total=eta_total,
                          theta=detector.theta)


def _ladder(N: int) -> sp.csr_matrix:
    return sp.diags(np.sqrt(np.arange(1, N + 1, dtype=float)), 1, format="csr")


def equatorial_distribution(gain: GainParams, phi: float, n_trunc: int = PHASE_CHECK_TRUNC):
    """
    Evolui |1,0>_phi e |0,1>_phi sob H = i chi a_H^+ a_V^+ + h.c. na base H/V
    e projeta nos estados de Fock da base equatorial phi:
        a_phi^+      = ( e^{i phi} a_H^+ + e^{-i phi} a_V^+) / sqrt 2
        a_phi_perp^+ = i ( e^{i phi} a_H^+ - e^{-i phi} a_V^+) / sqrt 2
    Retorna (P_10, P_01, massa_desprezada): P[n, m] para n + m <= n_trunc.
    """
    N = int(n_trunc)
    eye = sp.identity(N + 1, format="csr")
    a = _ladder(N)
    aH = sp.kron(a, eye, format="csr")
    aV = sp.kron(eye, a, format="csr")
    gen = (gain.g * (aH.T @ aV.T - aH @ aV)).astype(complex)

    ph = np.exp(1j * phi)
    up = (ph * aH.T + np.conj(ph) * aV.T) / math.sqrt(2.0)
    up_perp = 1j * (ph * aH.T - np.conj(ph) * aV.T) / math.sqrt(2.0)

    vac = np.zeros((N + 1) ** 2, dtype=complex)
    vac[0] = 1.0
    outs = [expm_multiply(gen, up @ vac), expm_multiply(gen, up_perp @ vac)]

    dists = [np.zeros((N + 1, N + 1)) for _ in outs]
    col = vac
    for m in range(N + 1):
        ket = col
        for n in range(N + 1 - m):
            for dist, out in zip(dists, outs):
                dist[n, m] = abs(np.vdot(ket, out)) ** 2
            ket = up @ ket / math.sqrt(n + 1)
        col = up_perp @ col / math.sqrt(m + 1)

    neglected = max(0.0, 1.0 - min(compensated_sum(d) for d in dists))
    return dists[0], dists[1], neglected


def _evolved_equatorial(gain: GainParams, phi: float, n_trunc: int, caller: str):
    if gain.g > 0.4:
        raise ValueError(f"{caller} exige g <= 0.4, recebido {gain.g}")
    p10, p01, neglected = equatorial_distribution(gain, phi, n_trunc)
    if math.sqrt(neglected) > 1e-6:
        raise TruncationError(f"Amplitude desprezada {math.sqrt(neglected):.2e} > 1e-6 (n_trunc={n_trunc})")
    return p10, p01


def phase_covariance_check(gain: GainParams, phi: float, n_trunc: int = PHASE_CHECK_TRUNC) -> float:
    """
    Desvio máximo entre a distribuição na base phi de e^{-iHt}|1,0>_phi
    (e |0,1>_phi) e a previsão em produto |A1>|A0>_perp (|A0>|A1>_perp).
    Válido para g <= 0.4 (truncamento da evolução).
    """
    p10, p01 = _evolved_equatorial(gain, phi, n_trunc, "phase_covariance_check")

    N = int(n_trunc)
    a1 = _squeezed_amplitudes(gain.g, 1, N).number_distribution()
    a0 = _squeezed_amplitudes(gain.g, 0, N).number_distribution()
    inside = np.add.outer(np.arange(N + 1), np.arange(N + 1)) <= N
    dev_10 = np.max(np.abs(p10 - np.outer(a1, a0))[inside])
    dev_01 = np.max(np.abs(p01 - np.outer(a0, a1))[inside])
    return float(max(dev_10, dev_01))


def equatorial_witness_term(gain: GainParams, loss: LossChannel, phi: float,
                            n_trunc: int = PHASE_CHECK_TRUNC) -> float:
    """
    -<J_phi sigma_phi> a partir da evolução explícita de |1,0>_phi e
    |0,1>_phi na base H/V, com perdas binomiais nos dois modos. phi = 0 dá
    a componente x, phi = pi/4 a componente y. Válido para g <= 0.4.
    """
    p10, p01 = _evolved_equatorial(gain, phi, n_trunc, "equatorial_witness_term")
    n = np.arange(p10.shape[0])
    diff = np.subtract.outer(n, n)
    # b em b_perp (sigma = -1) arauta |1,0>_phi; b em b (sigma = +1), |0,1>_phi
    j_sigma = 0.5 * (-compensated_sum(diff * two_mode_loss(p10, loss.eta))
                     + compensated_sum(diff * two_mode_loss(p01, loss.eta)))
    return -j_sigma


def _equatorial_correlator(a1: FockVector, a0: FockVector, eta: float):
    """
    <J sigma> e <N_a> para o singleto escrito numa base equatorial: com o
    fóton b em b_perp o modo a carrega |A1>|A0>_perp (sigma = -1); com b em b,
    |A0>|A1>_perp (sigma = +1). J = n_a - n_perp é diagonal nessa base.
    A forma do estado não depende da base escolhida (covariância de fase).
    """
    p1, p0 = a1.number_distribution(), a0.number_distribution()
    n = np.arange(p1.size)
    diff = np.subtract.outer(n, n)
    total = np.add.outer(n, n)
    j_sigma = 0.0
    n_a = 0.0
    for sigma, p2 in ((-1.0, np.outer(p1, p0)), (+1.0, np.outer(p0, p1))):
        lossy = two_mode_loss(p2, eta)
        j_sigma += 0.5 * sigma * compensated_sum(diff * lossy)
        n_a += 0.5 * compensated_sum(total * lossy)
    return j_sigma, n_a


def witness_oracle(gain: GainParams, loss: LossChannel, n_trunc: Optional[int] = None) -> WitnessReport:
    """
    Correladores do critério micro-macro a partir do estado explícito
    (dois modos x qubit), com perdas binomiais em cada modo de a.
    """
    if gain.g > WITNESS_ORACLE_G_MAX:
        raise ValueError(f"witness_oracle exige g <= {WITNESS_ORACLE_G_MAX}, recebido {gain.g}")
    eta = loss.eta

    a1, a0 = _seed_pair(gain, n_trunc)
    jx_sigma, n_a = _equatorial_correlator(a1, a0, eta)
    # J_y vem de J_x pela covariância de fase (mesma forma do estado na base y);
    # equatorial_witness_term(phi=pi/4) confere isso pela evolução explícita
    jy_sigma = jx_sigma

    # J_z = n_H - n_V: singleto (a_H^+ b_V^+ - a_V^+ b_H^+)/sqrt 2 na base H/V
    hv = two_mode_squeezed_photon(gain, n_trunc)
    p_h = two_mode_loss(hv.number_distribution(), eta)
    p_v = p_h.T
    n = np.arange(p_h.shape[0])
    diff = np.subtract.outer(n, n)
    jz_sigma = 0.5 * (-compensated_sum(diff * p_h) + compensated_sum(diff * p_v))

    return make_report(jz_sz=-jz_sigma, jx_sx=-jx_sigma, jy_sy=-jy_sigma, n_a=n_a)
