"""
Séries de potências truncadas em z.

As probabilidades de Fock P(m) são coeficientes de Taylor de funções
geradoras em z = e^{-ik}; aqui ficam as operações mínimas para extraí-los:
potência real de um polinômio e multiplicação por um fator linear.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class TruncatedPowerSeries:
    """Coeficientes c_0..c_M de uma série formal em z (c_m multiplica z^m)."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.ndim != 1 or c.size == 0:
            raise ValueError("coeffs deve ser um vetor 1D não vazio")
        if not np.all(np.isfinite(c)):
            raise ArithmeticError("Série com coeficientes não finitos (NaN/inf)")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    def __len__(self):
        return self.coeffs.size

    def __getitem__(self, idx):
        return self.coeffs[idx]


def _is_integer(x: float) -> bool:
    return float(x).is_integer()


def poly_power(p, alpha: float, M: int, prefix: TruncatedPowerSeries = None) -> TruncatedPowerSeries:
    """
    Primeiros M+1 coeficientes de Taylor de p(z)^alpha em torno de z=0.

    Para f = p^alpha vale f' p = alpha p' f, o que dá a recorrência linear
        n p_0 f_n = sum_{k=1..min(n,d)} ((alpha+1) k - n) p_k f_{n-k},
        f_0 = p_0^alpha.
    Custo O(M d). Expoentes inteiros não negativos são expandidos por
    convolução direta (resultado exato para alpha = 1).

    prefix: série já calculada para o mesmo (p, alpha); a recorrência
    continua a partir do último coeficiente dela em vez de recomeçar.
    """
    pk = np.trim_zeros(np.asarray(p, dtype=float), trim="b")
    M = int(M)
    if M < 0:
        raise ValueError(f"Ordem M deve ser >= 0, recebido {M}")
    if pk.size == 0 or pk[0] == 0.0:
        raise ValueError("p[0] = 0: potência da série indefinida na origem")
    alpha = float(alpha)
    if pk[0] < 0.0 and not _is_integer(alpha):
        raise ValueError("p[0] < 0 com expoente não inteiro (ramo complexo)")

    if alpha >= 0.0 and _is_integer(alpha):
        out = np.zeros(M + 1)
        out[0] = 1.0
        for _ in range(int(alpha)):
            out = np.convolve(out, pk)[: M + 1]
        return TruncatedPowerSeries(np.pad(out, (0, M + 1 - out.size)))

    d = pk.size - 1
    coef = pk.tolist()
    p0 = coef[0]
    a1 = alpha + 1.0

    f = [0.0] * (M + 1)
    f[0] = p0 ** alpha
    start = 1
    if prefix is not None:
        start = min(prefix.order, M) + 1
        f[:start] = prefix.coeffs[:start].tolist()
    for n in range(start, M + 1):
        acc = 0.0
        for k in range(1, min(n, d) + 1):
            acc += (a1 * k - n) * coef[k] * f[n - k]
        f[n] = acc / (n * p0)

    return TruncatedPowerSeries(np.array(f))


def mul_by_linear(s: TruncatedPowerSeries, a: float, b: float) -> TruncatedPowerSeries:
    """(a + b z) s(z) truncada na mesma ordem: c_m = a s_m + b s_{m-1}."""
    c = np.asarray(s.coeffs, dtype=float)
    out = a * c
    out[1:] += b * c[:-1]
    return TruncatedPowerSeries(out)


def truncated_product(s: TruncatedPowerSeries, t: TruncatedPowerSeries) -> TruncatedPowerSeries:
    """Produto de Cauchy truncado na menor das duas ordens."""
    M = min(s.order, t.order)
    return TruncatedPowerSeries(np.convolve(s.coeffs[: M + 1], t.coeffs[: M + 1])[: M + 1])
