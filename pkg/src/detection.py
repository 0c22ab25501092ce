"""
Olho humano como detector de limiar precedido de perdas:
    E_y = C_L^+ T_y C_L,   T_y = 1 - sum_{m<theta} |m><m|

Dois olhos idênticos e independentes observam os modos a e a_perp do estado
amplificado |Phi> = |A1>|A0>_perp. Só a forma |Phi> é calculada; para
|Phi_perp> = |A0>|A1>_perp basta trocar p_yn <-> p_ny (e V -> -V), de modo
que eps é o mesmo para os dois estados.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.stats import poisson

from amplifier import GainParams, LossChannel, PhotonNumberDistribution, certified_distributions, total_mean_photons
from constants import EPS_UNDEFINED, ETA_EYE, M_MAX_CAP, NEG_CLAMP, TAIL_TOL, THETA
from utils import check_transmission, compensated_sum

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ThresholdDetector:
    theta: int = THETA
    eta_eye: float = ETA_EYE

    def __post_init__(self):
        if int(self.theta) != self.theta or self.theta < 1:
            raise ValueError(f"theta deve ser inteiro >= 1, recebido {self.theta}")
        object.__setattr__(self, "theta", int(self.theta))
        object.__setattr__(self, "eta_eye", check_transmission(self.eta_eye, "eta_eye"))


@dataclass(frozen=True)
class DetectionStats:
    """
    Probabilidades conjuntas (olho a, olho a_perp) dado |Phi>.
    visibility = None quando eps ~ 0 (0/0: "sem dados", não "sem correlação").
    """

    p_yn: float
    p_ny: float
    p_yy: float
    p_nn: float
    epsilon: float
    visibility: Optional[float]
    mean_N: float
    g: float = 0.0
    eta_total: float = ETA_EYE
    theta: int = THETA

    @property
    def visibility_defined(self) -> bool:
        return self.visibility is not None


def prob_no(dist: PhotonNumberDistribution, theta: int) -> float:
    """sum_{m<theta} P(m), com soma compensada."""
    theta = int(theta)
    if theta < 1:
        raise ValueError(f"theta deve ser >= 1, recebido {theta}")
    # distribuição completa (sem cauda) pode ser mais curta que theta
    if dist.m_max < theta - 1 and dist.tail_bound > NEG_CLAMP:
        raise ValueError(
            f"Distribuição truncada em m_max={dist.m_max} < theta-1={theta - 1}: soma de cabeça indisponível"
        )
    head = compensated_sum(dist.clamped()[:theta])
    return min(max(head, 0.0), 1.0)


def prob_yes(dist: PhotonNumberDistribution, theta: int) -> float:
    """<E_y> = 1 - sum_{m<theta} P(m), limitado a [0, 1]."""
    return min(max(1.0 - prob_no(dist, theta), 0.0), 1.0)


def compose_transmission(etas: Sequence[float]) -> float:
    """Divisores de feixe em série: a transmissão total é o produto."""
    etas = list(etas)
    if not etas:
        raise ValueError("Lista de transmissões vazia")
    total = 1.0
    for i, eta in enumerate(etas):
        total *= check_transmission(eta, f"etas[{i}]")
    return total


def stats_from_distributions(dist_a0: PhotonNumberDistribution, dist_a1: PhotonNumberDistribution,
                             theta: int, mean_N: float = float("nan"), g: float = 0.0,
                             eta_total: float = ETA_EYE) -> DetectionStats:
    """Monta as quatro probabilidades p(x_a, x_perp | Phi) = <A1|E_x|A1><A0|E_x'|A0>."""
    n1 = prob_no(dist_a1, theta)
    n0 = prob_no(dist_a0, theta)
    y1 = 1.0 - n1
    y0 = 1.0 - n0

    p_yn = y1 * n0
    p_ny = n1 * y0
    p_yy = y1 * y0
    p_nn = n1 * n0
    eps = p_yn + p_ny
    vis = (p_yn - p_ny) / eps if eps >= EPS_UNDEFINED else None
    return DetectionStats(p_yn=p_yn, p_ny=p_ny, p_yy=p_yy, p_nn=p_nn, epsilon=eps,
                          visibility=vis, mean_N=mean_N, g=g, eta_total=eta_total, theta=int(theta))


def joint_stats(gain: GainParams, detector: ThresholdDetector = ThresholdDetector(),
                extra_transmission: float = 1.0, tail_tol: float = TAIL_TOL,
                cap: int = M_MAX_CAP) -> DetectionStats:
    """
    Estatística dos dois olhos para |Phi>, com as perdas extras após a
    amplificação incorporadas na transmissão efetiva eta_eye * extra.
    Propaga TruncationError se m_max exceder cap.
    """
    eta_total = compose_transmission([detector.eta_eye, extra_transmission])
    dist_a0, dist_a1 = certified_distributions(gain, LossChannel(eta_total), tail_tol, cap)
    stats = stats_from_distributions(dist_a0, dist_a1, detector.theta, mean_N=total_mean_photons(gain),
                                     g=gain.g, eta_total=eta_total)
    if not stats.visibility_defined:
        log.debug("Visibilidade indefinida em g=%.6g (eps=%.3e)", gain.g, stats.epsilon)
    return stats


def eye_response(n_mean, detector: ThresholdDetector = ThresholdDetector()):
    """
    Curva de resposta do olho para um pulso coerente com n_mean fótons
    incidentes: após as perdas a contagem é Poisson(eta * n_mean), logo
    P_yes = P(N >= theta). Aceita escalar ou array.
    """
    n_mean = np.asarray(n_mean, dtype=float)
    if np.any(n_mean < 0.0):
        raise ValueError("n_mean deve ser >= 0")
    p = poisson.sf(detector.theta - 1, detector.eta_eye * n_mean)
    return float(p) if p.ndim == 0 else p
