import math

import numpy as np

from constants import NEG_CLAMP


class ConfigError(ValueError):
    """Configuração inválida (arquivo ou flags). Mapeada para o código de saída 2."""


class TruncationError(ArithmeticError):
    """Truncamento insuficiente ou limite de m_max excedido. Mapeado para o código 3."""


def compensated_sum(values) -> float:
    """
    Soma compensada (exatamente arredondada) de um array de reais de qualquer forma.
    Usada nas somas de cauda e de cabeça das distribuições.
    """
    return math.fsum(np.asarray(values, dtype=float).ravel().tolist())


def clamp_round_off(probs, tol: float = NEG_CLAMP):
    """
    Zera coeficientes negativos minúsculos (|p| < tol) vindos de arredondamento.
    Aplicado apenas na leitura; o vetor armazenado não é alterado.
    Valores negativos maiores que tol indicam instabilidade e geram erro.
    """
    p = np.asarray(probs, dtype=float)
    if p.size and p.min() < -tol:
        raise ArithmeticError(
            f"Probabilidade negativa {p.min():.3e} além do arredondamento tolerado ({tol:.0e})"
        )
    return np.where(p < 0.0, 0.0, p)


def check_transmission(eta: float, name: str = "eta") -> float:
    """Valida uma transmissão em (0, 1]."""
    eta = float(eta)
    if not (0.0 < eta <= 1.0) or not math.isfinite(eta):
        raise ValueError(f"{name} deve estar em (0, 1], recebido {eta}")
    return eta


def check_gain(g: float) -> float:
    g = float(g)
    if not math.isfinite(g) or g < 0.0:
        raise ValueError(f"Ganho g deve ser finito e >= 0, recebido {g}")
    return g


def check_integer(value, name: str) -> int:
    """Inteiro exato: 7 e 7.0 passam, 7.9 e True não."""
    if isinstance(value, bool):
        raise ConfigError(f"{name} deve ser inteiro, recebido {value}")
    try:
        as_float = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} deve ser inteiro, recebido {value!r}") from None
    if not as_float.is_integer():
        raise ConfigError(f"{name} deve ser inteiro, recebido {value}")
    return int(as_float)
