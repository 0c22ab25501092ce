"""
CHSH no cenário micro-macro com pós-seleção dos eventos conclusivos.

Fóton b: detector ideal. Macro-sistema a: dois olhos, eventos (y,n) -> plus,
(n,y) -> minus, (y,y) e (n,n) -> inconclusivo (descartados).

Pela propriedade de paridade (ver oracle.superposition_detection) o estado
arauto em a é uma mistura cos^2/sin^2 de |Phi> e |Phi_perp> na base de a,
e o correlador conclusivo é E(delta) = -V cos(delta), delta = ângulo
equatorial relativo.

Gerador: PCG64 do NumPy (np.random.default_rng), semeado por SeedSequence.
Os ensaios são divididos em blocos de tamanho fixo, cada um com uma
sub-semente derivada; o resultado independe do número de workers.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from constants import MC_BLOCK
from detection import DetectionStats

log = logging.getLogger(__name__)

# (a0, a1, b0, b1): ângulos equatoriais ótimos para o singleto
DEFAULT_SETTINGS = (0.0, math.pi / 2, math.pi / 4, -math.pi / 4)
# sinal de cada par (i, j) em S = E00 + E01 + E10 - E11
CHSH_SIGNS = np.array([1.0, 1.0, 1.0, -1.0])

RESULT_LABELS = {1: "plus", -1: "minus", 0: "inconclusive"}


@dataclass(frozen=True)
class BellOutcome:
    trial_id: int
    basis_a: float
    basis_b: float
    result_a: str
    result_b: str


@dataclass(frozen=True)
class ChshEstimate:
    s_value: float
    std_error: float
    conclusive_rate: float
    n_trials: int
    n_conclusive: int
    correlations: Tuple[float, float, float, float]


def _check_visibility(visibility: float) -> float:
    if visibility is None or not abs(visibility) <= 1.0 + 1e-12:
        raise ValueError(f"|V| <= 1 exigido, recebido {visibility}")
    return float(visibility)


def correlation(delta: float, visibility: float) -> float:
    """Correlador dos eventos conclusivos: E(delta) = -V cos(delta)."""
    return -_check_visibility(visibility) * math.cos(delta)


def chsh_value(visibility: float) -> float:
    """S = 2 sqrt(2) V nos ângulos ótimos (0, pi/2 | pi/4, -pi/4)."""
    return 2.0 * math.sqrt(2.0) * _check_visibility(visibility)


def _sample_block(n: int, stats: DetectionStats, settings: Sequence[float], seed: np.random.SeedSequence):
    """Sorteia n ensaios: (par de ajustes 0..3, resultado b +-1, resultado a +-1/0)."""
    rng = np.random.default_rng(seed)
    a_angles = np.array(settings[:2])
    b_angles = np.array(settings[2:])

    pair = rng.integers(0, 4, size=n)
    delta = a_angles[pair // 2] - b_angles[pair % 2]
    res_b = np.where(rng.random(n) < 0.5, 1, -1)

    # b = plus  -> a arauto em Phi_perp da base de b; b = minus -> Phi
    half = np.cos(delta / 2.0) ** 2
    p_phi = np.where(res_b == 1, 1.0 - half, half)
    is_phi = rng.random(n) < p_phi

    # Phi: plus com p_yn, minus com p_ny; Phi_perp: espelhado
    p_plus = np.where(is_phi, stats.p_yn, stats.p_ny)
    p_minus = np.where(is_phi, stats.p_ny, stats.p_yn)
    u = rng.random(n)
    res_a = np.where(u < p_plus, 1, np.where(u < p_plus + p_minus, -1, 0))
    return pair, res_b, res_a


def _block_seeds(n_trials: int, rng_seed: int):
    n_blocks = -(-n_trials // MC_BLOCK)
    sizes = [MC_BLOCK] * (n_blocks - 1) + [n_trials - MC_BLOCK * (n_blocks - 1)]
    return list(zip(sizes, np.random.SeedSequence(rng_seed).spawn(n_blocks)))


def _count_block(args):
    n, stats, settings, seed = args
    pair, res_b, res_a = _sample_block(n, stats, settings, seed)
    conclusive = res_a != 0
    n_conc = np.bincount(pair[conclusive], minlength=4)
    prod = np.bincount(pair[conclusive], weights=(res_a * res_b)[conclusive], minlength=4)
    return n_conc, prod


def simulate_trials(n_trials: int, stats: DetectionStats, settings: Sequence[float] = DEFAULT_SETTINGS,
                    rng_seed: int = 0, workers: int = 1) -> ChshEstimate:
    """
    Monte Carlo do experimento CHSH pós-selecionado. Retorna |S| estimado,
    erro padrão (soma das variâncias binomiais dos quatro correladores) e a
    fração de eventos conclusivos (-> eps).
    """
    n_trials = int(n_trials)
    if n_trials < 1:
        raise ValueError(f"n_trials deve ser >= 1, recebido {n_trials}")
    if len(settings) != 4:
        raise ValueError("settings = (a0, a1, b0, b1)")

    jobs = [(n, stats, tuple(settings), seed) for n, seed in _block_seeds(n_trials, rng_seed)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(_count_block, jobs))
    else:
        results = [_count_block(job) for job in jobs]

    n_conc = np.sum([r[0] for r in results], axis=0)
    prod = np.sum([r[1] for r in results], axis=0)
    total = int(n_conc.sum())

    if np.any(n_conc == 0):
        log.warning("Ajustes sem eventos conclusivos (%s): S indefinido", n_conc.tolist())
        corr = np.where(n_conc > 0, prod / np.maximum(n_conc, 1), np.nan)
        return ChshEstimate(s_value=float("nan"), std_error=float("nan"), conclusive_rate=total / n_trials,
                            n_trials=n_trials, n_conclusive=total, correlations=tuple(corr.tolist()))

    corr = prod / n_conc
    s_raw = float(np.dot(CHSH_SIGNS, corr))
    var = np.sum((1.0 - corr ** 2) / n_conc)
    return ChshEstimate(s_value=abs(s_raw), std_error=math.sqrt(var), conclusive_rate=total / n_trials,
                        n_trials=n_trials, n_conclusive=total, correlations=tuple(corr.tolist()))


def outcomes(n_trials: int, stats: DetectionStats, settings: Sequence[float] = DEFAULT_SETTINGS,
             rng_seed: int = 0) -> List[BellOutcome]:
    """Registro ensaio a ensaio (mesmos sorteios de simulate_trials)."""
    events = []
    trial = 0
    for n, seed in _block_seeds(int(n_trials), rng_seed):
        pair, res_b, res_a = _sample_block(n, stats, tuple(settings), seed)
        for k in range(n):
            events.append(BellOutcome(
                trial_id=trial,
                basis_a=settings[pair[k] // 2],
                basis_b=settings[2 + pair[k] % 2],
                result_a=RESULT_LABELS[int(res_a[k])],
                result_b=RESULT_LABELS[int(res_b[k])],
            ))
            trial += 1
    return events
