# sweep.py
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from amplifier import GainParams, gain_from_mean_photons
from constants import ETA_EYE, EXTRA_TRANSMISSIONS, M_MAX_CAP, N_GRID, N_MEAN_MAX, N_MEAN_MIN, TAIL_TOL, THETA
from detection import DetectionStats, ThresholdDetector, joint_stats
from utils import ConfigError, TruncationError, check_integer

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SweepConfig:
    g_grid: Tuple[float, ...]
    theta: int = THETA
    eta_eye: float = ETA_EYE
    extra_transmissions: Tuple[float, ...] = EXTRA_TRANSMISSIONS
    tail_tol: float = TAIL_TOL
    fmt: str = "csv"
    output: Optional[str] = None
    workers: int = 1
    cap: int = M_MAX_CAP


def geometric_gain_grid(n_min: float, n_max: float, count: int) -> Tuple[float, ...]:
    """Ganhos cujo <N_a> = 4 sinh^2 g + 1 forma uma grade geométrica em [n_min, n_max]."""
    if count < 1 or not (1.0 <= n_min <= n_max):
        raise ConfigError(f"Grade inválida: n_min={n_min}, n_max={n_max}, count={count}")
    n_means = np.geomspace(n_min, n_max, int(count))
    return tuple(gain_from_mean_photons(n).g for n in n_means)


def as_tuple(value) -> Tuple[float, ...]:
    if isinstance(value, (list, tuple)):
        return tuple(float(v) for v in value)
    return (float(value),)


def build_sweep_config(config: Dict[str, Any]) -> SweepConfig:
    """
    Valida o dicionário de configuração (arquivo + flags) e monta a SweepConfig.
    Chaves: g | n_mean_min, n_mean_max, points; theta; eta; extra_loss;
    tail_tol; format; output; workers; m_max_cap.
    """
    try:
        if config.get("g") is not None:
            g_grid = as_tuple(config["g"])
        else:
            g_grid = geometric_gain_grid(float(config.get("n_mean_min", N_MEAN_MIN)),
                                         float(config.get("n_mean_max", N_MEAN_MAX)),
                                         check_integer(config.get("points", N_GRID), "points"))
        extra = as_tuple(config.get("extra_loss", EXTRA_TRANSMISSIONS))
        cfg = SweepConfig(
            g_grid=g_grid,
            theta=check_integer(config.get("theta", THETA), "theta"),
            eta_eye=float(config.get("eta", ETA_EYE)),
            extra_transmissions=extra,
            tail_tol=float(config.get("tail_tol", TAIL_TOL)),
            fmt=str(config.get("format", "csv")).lower(),
            output=config.get("output"),
            workers=check_integer(config.get("workers", 1), "workers"),
            cap=check_integer(config.get("m_max_cap", M_MAX_CAP), "m_max_cap"),
        )
    except (TypeError, ValueError) as e:
        raise ConfigError(f"Configuração de varredura inválida: {e}") from e

    if not cfg.g_grid:
        raise ConfigError("Grade de ganhos vazia")
    if any(g < 0.0 or not math.isfinite(g) for g in cfg.g_grid):
        raise ConfigError("Ganhos devem ser finitos e >= 0")
    if not cfg.extra_transmissions or any(not (0.0 < t <= 1.0) for t in cfg.extra_transmissions):
        raise ConfigError("Transmissões extras devem estar em (0, 1]")
    if not (0.0 < cfg.eta_eye <= 1.0):
        raise ConfigError("eta deve estar em (0, 1]")
    if cfg.theta < 1:
        raise ConfigError("theta deve ser >= 1")
    if not (0.0 < cfg.tail_tol < 1.0):
        raise ConfigError("tail_tol deve estar em (0, 1)")
    if cfg.cap < 1:
        raise ConfigError("m_max_cap deve ser >= 1")
    if cfg.fmt not in ("csv", "json"):
        raise ConfigError(f"Formato desconhecido: {cfg.fmt}")
    return cfg


def stats_row(stats: DetectionStats) -> Dict[str, Any]:
    return {
        "g": stats.g,
        "N_mean": stats.mean_N,
        "epsilon": stats.epsilon,
        "V": stats.visibility,
        "p_yn": stats.p_yn,
        "p_ny": stats.p_ny,
        "p_yy": stats.p_yy,
        "p_nn": stats.p_nn,
        "eta_total": stats.eta_total,
    }


def refine_peak(detector: ThresholdDetector, extra: float, tail_tol: float, cap: int,
                n_lo: float, n_mid: float, n_hi: float) -> DetectionStats:
    """Seção áurea em log <N_a> em torno do melhor ponto da grade."""

    def neg_eps(log_n):
        g = gain_from_mean_photons(math.exp(log_n))
        return -joint_stats(g, detector, extra, tail_tol, cap).epsilon

    res = minimize_scalar(neg_eps, bracket=(math.log(n_lo), math.log(n_mid), math.log(n_hi)),
                          method="golden", options={"xtol": 1e-4})
    return joint_stats(gain_from_mean_photons(math.exp(res.x)), detector, extra, tail_tol, cap)


def summarize(curve: List[DetectionStats], detector: ThresholdDetector, extra: float,
              tail_tol: float, cap: int = M_MAX_CAP) -> Dict[str, Any]:
    """Máximo de eps (refinado) e mínimo de V de uma curva."""
    curve = sorted(curve, key=lambda s: s.mean_N)
    eps = np.array([s.epsilon for s in curve])
    i = int(np.argmax(eps))
    best = curve[i]
    if 0 < i < len(curve) - 1 and eps[i] > eps[i - 1] and eps[i] > eps[i + 1]:
        best = refine_peak(detector, extra, tail_tol, cap, curve[i - 1].mean_N, curve[i].mean_N, curve[i + 1].mean_N)
        if best.epsilon < eps[i]:
            best = curve[i]

    defined = [s for s in curve if s.visibility_defined]
    v_min = min(defined, key=lambda s: s.visibility) if defined else None
    return {
        "eta_total": best.eta_total,
        "extra_transmission": extra,
        "epsilon_max": best.epsilon,
        "N_mean_at_max": best.mean_N,
        "g_at_max": best.g,
        "V_at_max": best.visibility,
        "V_min": v_min.visibility if v_min else None,
        "N_mean_at_V_min": v_min.mean_N if v_min else None,
    }


def run_sweep(cfg: SweepConfig) -> Dict[str, Any]:
    """
    Percorre a grade de ganhos para cada transmissão extra.

    Returns:
        results: dict com 'rows' (ordem da grade, transmissão por transmissão),
        'summary' (um registro por transmissão), 'check' (mensagens) e
        'failed' (True se algum ponto excedeu o limite de m_max).
    """
    detector = ThresholdDetector(cfg.theta, cfg.eta_eye)
    gains = [GainParams(g) for g in cfg.g_grid]

    rows = []
    summary = []
    check_msgs = []
    failed = False

    for extra in cfg.extra_transmissions:

        def point(gain):
            return joint_stats(gain, detector, extra, cfg.tail_tol, cfg.cap)

        try:
            if cfg.workers > 1:
                with ThreadPoolExecutor(max_workers=cfg.workers) as executor:
                    curve = list(executor.map(point, gains))
            else:
                curve = [point(gain) for gain in gains]
        except TruncationError as e:
            check_msgs.append(f"[extra={extra:.6g}] Falha numérica: {e}")
            failed = True
            break

        rows.extend(stats_row(s) for s in curve)
        n_undef = sum(not s.visibility_defined for s in curve)
        if n_undef:
            log.warning("%d ponto(s) com visibilidade indefinida (eps ~ 0) para extra=%.6g", n_undef, extra)

        try:
            summary.append(summarize(curve, detector, extra, cfg.tail_tol, cfg.cap))
        except TruncationError as e:
            check_msgs.append(f"[extra={extra:.6g}] Falha no refinamento do máximo: {e}")
            failed = True
            break

        s = summary[-1]
        log.info("eta_total=%.6g: eps_max=%.4f em <N_a>=%.1f, V_min=%s",
                 s["eta_total"], s["epsilon_max"], s["N_mean_at_max"],
                 "n/a" if s["V_min"] is None else f"{s['V_min']:.4f}")

    return {
        "rows": rows,
        "summary": summary,
        "check": "\n".join(check_msgs) if check_msgs else "Varredura executada com sucesso.",
        "failed": failed,
    }
