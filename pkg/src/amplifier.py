# amplifier.py
"""
Estatística de fótons dos estados amplificados |A0> = U|0> e |A1> = U|1>
após um canal de perdas de transmissão eta.

Funções geradoras (z = e^{-ik}):
    X0 = (1 - eta + eta z)^{-1}
    X  = X0 cosh^2 g - sinh^2 g / X0
    Y  = X / X0 = cosh^2 g - sinh^2 g (1 - eta + eta z)^2
    Z  = 1/2 d/dg X   (cancela nos valores esperados diagonais; não é avaliado)

    P_A0(m) = [z^m] Y^{-1/2}
    P_A1(m) = [z^m] Y^{-1/2} X^{-1} = [z^m] (1 - eta + eta z) Y^{-3/2}
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from constants import M_MAX_CAP, MEAN_TAIL_WARN, TAIL_WINDOW
from series import TruncatedPowerSeries, mul_by_linear, poly_power
from utils import TruncationError, check_gain, check_transmission, clamp_round_off, compensated_sum

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class GainParams:
    """Ganho de amplificação g = chi * t (só o produto importa)."""

    g: float

    def __post_init__(self):
        object.__setattr__(self, "g", check_gain(self.g))

    @property
    def sinh2(self) -> float:
        return math.sinh(self.g) ** 2


@dataclass(frozen=True)
class LossChannel:
    """Transmissão eta = cos^2(gamma) do divisor de feixe com modo vazio c."""

    eta: float

    def __post_init__(self):
        object.__setattr__(self, "eta", check_transmission(self.eta))


@dataclass(frozen=True)
class GeneratingBundle:
    Y_poly: np.ndarray
    g: float
    eta: float
    X0_def: str = "X0(z) = (1 - eta + eta z)^(-1)"
    X_def: str = "X(z) = X0 cosh^2 g - sinh^2 g / X0"
    Z_def: str = "Z(z) = 1/2 dX/dg"


@dataclass(frozen=True)
class PhotonNumberDistribution:
    """
    P(0..m_max) de um estado semente (0 -> |A0>, 1 -> |A1>) após perdas.
    tail_bound limita a massa omitida sum_{m > m_max} P(m).
    """

    probs: np.ndarray
    tail_bound: float
    mean: float
    g: Optional[float] = None
    eta: Optional[float] = None
    seed: Optional[int] = None
    mean_is_lower_bound: bool = field(default=False)

    @property
    def m_max(self) -> int:
        return self.probs.size - 1

    def clamped(self) -> np.ndarray:
        """Probabilidades com o arredondamento negativo zerado (leitura)."""
        return clamp_round_off(self.probs)

    def __getitem__(self, m):
        return self.clamped()[m]


def _check_seed(seed: int) -> int:
    if seed not in (0, 1):
        raise ValueError(f"seed deve ser 0 (|A0>) ou 1 (|A1>), recebido {seed}")
    return int(seed)


def build_bundle(gain: GainParams, loss: LossChannel) -> GeneratingBundle:
    """Coeficientes de Y(z) = cosh^2 g - sinh^2 g (1 - eta + eta z)^2."""
    s2 = gain.sinh2
    eta = loss.eta
    # cosh^2 g - sinh^2 g (1-eta)^2 escrito sem a diferença cosh^2 - sinh^2
    y0 = 1.0 + s2 * eta * (2.0 - eta)
    y1 = -2.0 * eta * (1.0 - eta) * s2
    y2 = -eta * eta * s2
    return GeneratingBundle(Y_poly=np.array([y0, y1, y2]), g=gain.g, eta=eta)


def _seed_series(seed: int, bundle: GeneratingBundle, m_max: int,
                 prefix: Optional[TruncatedPowerSeries] = None) -> TruncatedPowerSeries:
    """Série base antes do fator linear: Y^{-1/2} (seed 0) ou Y^{-3/2} (seed 1)."""
    alpha = -0.5 if seed == 0 else -1.5
    return poly_power(bundle.Y_poly, alpha, m_max, prefix=prefix)


def _to_distribution(seed: int, base: TruncatedPowerSeries, bundle: GeneratingBundle,
                     warn: bool = True) -> PhotonNumberDistribution:
    if seed == 1:
        base = mul_by_linear(base, 1.0 - bundle.eta, bundle.eta)
    probs = np.array(base.coeffs)
    tail = max(0.0, 1.0 - compensated_sum(probs))
    mean = compensated_sum(np.arange(probs.size) * probs)
    lower = tail > MEAN_TAIL_WARN
    if lower and warn:
        log.warning(
            "Média de |A%d> (g=%.4g, eta=%.4g) calculada com cauda %.2e: valor é cota inferior",
            seed, bundle.g, bundle.eta, tail,
        )
    return PhotonNumberDistribution(
        probs=probs, tail_bound=tail, mean=mean,
        g=bundle.g, eta=bundle.eta, seed=seed, mean_is_lower_bound=lower,
    )


def photon_distribution(seed: int, gain: GainParams, loss: LossChannel, m_max: int) -> PhotonNumberDistribution:
    """Distribuição de número de fótons de |A_seed> após perdas, m = 0..m_max."""
    seed = _check_seed(seed)
    if int(m_max) < 0:
        raise ValueError(f"m_max deve ser >= 0, recebido {m_max}")
    bundle = build_bundle(gain, loss)
    return _to_distribution(seed, _seed_series(seed, bundle, int(m_max)), bundle)


def mean_photons(seed: int, gain: GainParams, loss: LossChannel) -> float:
    """<n> após perdas: eta sinh^2 g (|A0>) ou eta (3 sinh^2 g + 1) (|A1>)."""
    s2 = gain.sinh2
    if _check_seed(seed) == 0:
        return loss.eta * s2
    return loss.eta * (3.0 * s2 + 1.0)


def variance_photons(seed: int, gain: GainParams, loss: LossChannel) -> float:
    """
    Var(n) após perdas. Sem perdas: 2 s^2 c^2 (|A0>) e 6 s^2 c^2 (|A1>);
    o canal binomial dá Var_eta = eta^2 Var + eta (1 - eta) <n>.
    """
    s2 = gain.sinh2
    c2 = 1.0 + s2
    eta = loss.eta
    var0 = (2.0 if _check_seed(seed) == 0 else 6.0) * s2 * c2
    mean0 = s2 if seed == 0 else 3.0 * s2 + 1.0
    return eta * eta * var0 + eta * (1.0 - eta) * mean0


def total_mean_photons(gain: GainParams) -> float:
    """<N_a> = 4 sinh^2 g + 1, somado nos dois modos de polarização, antes das perdas."""
    return 4.0 * gain.sinh2 + 1.0


def gain_from_mean_photons(n_mean: float) -> GainParams:
    if n_mean < 1.0:
        raise ValueError(f"<N_a> >= 1 para qualquer ganho, recebido {n_mean}")
    return GainParams(math.asinh(math.sqrt((n_mean - 1.0) / 4.0)))


def _tail_certified(dist: PhotonNumberDistribution, tail_tol: float) -> bool:
    window = dist.probs[-TAIL_WINDOW:]
    m = max(dist.m_max, 1)
    return float(np.max(window)) < tail_tol / m and compensated_sum(dist.probs) > 1.0 - tail_tol


def certified_distributions(gain: GainParams, loss: LossChannel, tail_tol: float,
                            cap: int = M_MAX_CAP) -> Tuple[PhotonNumberDistribution, PhotonNumberDistribution]:
    """
    Distribuições de |A0> e |A1> estendidas até que a cauda omitida de ambas
    fique abaixo de tail_tol. A série é continuada (não recalculada) a cada
    duplicação de m_max.
    """
    if not (0.0 < tail_tol < 1.0):
        raise ValueError(f"tail_tol deve estar em (0, 1), recebido {tail_tol}")
    bundle = build_bundle(gain, loss)
    m = min(int(8.0 * (mean_photons(1, gain, loss) + 1.0) + 64), int(cap))
    bases = [None, None]

    while True:
        bases = [_seed_series(seed, bundle, m, prefix=bases[seed]) for seed in (0, 1)]
        dists = [_to_distribution(seed, bases[seed], bundle, warn=False) for seed in (0, 1)]
        if all(_tail_certified(d, tail_tol) for d in dists):
            log.debug("m_max=%d certificado para g=%.6g, eta=%.6g", m, gain.g, loss.eta)
            return dists[0], dists[1]
        if m >= cap:
            raise TruncationError(
                f"m_max excederia o limite {cap} (g={gain.g:.6g}, eta={loss.eta:.6g}, tail_tol={tail_tol:.1e})"
            )
        m = min(2 * m, int(cap))


def choose_m_max(gain: GainParams, loss: LossChannel, tail_tol: float, cap: int = M_MAX_CAP) -> int:
    """m_max tal que a massa omitida das duas distribuições seja < tail_tol."""
    dist0, _ = certified_distributions(gain, loss, tail_tol, cap)
    return dist0.m_max
