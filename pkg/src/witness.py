"""
Critério de separabilidade micro-macro.

Para estados separáveis vale |<J_a . J_b>| <= <N_a N_b>; com um único fóton
em b isso se reduz a |<J_a . sigma_b>| <= <N_a>, que é o único caso calculado.
As componentes são reportadas como anticorrelações do singleto,
-<J_k sigma_k> >= 0.
"""

from dataclasses import dataclass

from amplifier import GainParams, LossChannel


@dataclass(frozen=True)
class WitnessReport:
    jz_sz: float
    jx_sx: float
    jy_sy: float
    n_a: float
    lhs: float
    rhs: float
    margin: float

    @property
    def violated(self) -> bool:
        return self.margin > 0.0


def make_report(jz_sz: float, jx_sx: float, jy_sy: float, n_a: float) -> WitnessReport:
    lhs = abs(jz_sz + jx_sx + jy_sy)
    return WitnessReport(jz_sz=jz_sz, jx_sx=jx_sx, jy_sy=jy_sy, n_a=n_a,
                         lhs=lhs, rhs=n_a, margin=lhs - n_a)


def witness_closed_form(gain: GainParams, loss: LossChannel) -> WitnessReport:
    """
    Jz.sz = eta, Jx.sx = Jy.sy = eta (2 sinh^2 g + 1), <N_a> = eta (4 sinh^2 g + 1),
    logo |<J.sigma>| - <N_a> = 2 eta para qualquer g.
    """
    s2 = gain.sinh2
    eta = loss.eta
    equatorial = eta * (2.0 * s2 + 1.0)
    report = make_report(jz_sz=eta, jx_sx=equatorial, jy_sy=equatorial, n_a=eta * (4.0 * s2 + 1.0))
    # margem exata; lhs - rhs difere de 2 eta só por arredondamento
    return WitnessReport(jz_sz=report.jz_sz, jx_sx=report.jx_sx, jy_sy=report.jy_sy, n_a=report.n_a,
                         lhs=report.lhs, rhs=report.rhs, margin=2.0 * eta)
