"""
Micro-macro (Python)

Estatística de detecção de um fóton amplificado por clonagem de fase
covariante e observado por dois "olhos" (detectores de limiar com perdas):
varreduras de eficiência/visibilidade, critério de emaranhamento micro-macro,
CHSH pós-selecionado e verificação contra o oráculo de Fock.

Uso:
    python src/main.py sweep   [--extra-loss 1 0.5 0.25] [--output saida.csv]
    python src/main.py witness --g 1 --eta 0.5 [--verify]
    python src/main.py bell    [--g G | --n-mean 288] [--trials N] [--seed S]
    python src/main.py verify  [--level quick|full]
    python src/main.py response | distribution

Códigos de saída: 0 ok, 1 verificação falhou, 2 uso/configuração, 3 falha numérica.
"""

import argparse
import dataclasses
import logging
import signal
import sys

import numpy as np

from amplifier import GainParams, LossChannel, certified_distributions, gain_from_mean_photons, total_mean_photons
from bell import chsh_value, outcomes, simulate_trials
from constants import (BELL_COLUMNS, BELL_N_MEAN, BELL_TRIALS, DISTRIBUTION_COLUMNS, ETA_EYE, EVENT_COLUMNS,
                       EXIT_CHECK, EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE, RESPONSE_COLUMNS, SUMMARY_COLUMNS,
                       SWEEP_COLUMNS, TAIL_TOL, THETA, VERIFY_COLUMNS, WITNESS_COLUMNS, WITNESS_ORACLE_G_MAX,
                       WITNESS_ORACLE_TOL)
from detection import ThresholdDetector, compose_transmission, eye_response, joint_stats
from input_io import merge_config, read_config
from oracle import witness_oracle
from output_io import write_outputs
from sweep import as_tuple, build_sweep_config, run_sweep
from utils import ConfigError, check_integer
from verify import run_verify
from witness import witness_closed_form

log = logging.getLogger("main")

LOG_FORMAT = "%(asctime)s [%(levelname)s] %(message)s"


def signal_handler(sig, frame):
    log.warning("⚠️ Execução interrompida pelo usuário (CTRL+C).")
    sys.exit(130)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="arquivo chave = valor; flags têm precedência")
    common.add_argument("--theta", type=int, default=None, help=f"limiar do olho (padrão {THETA})")
    common.add_argument("--eta", type=float, default=None, help=f"transmissão do olho (padrão {ETA_EYE})")
    common.add_argument("--extra-loss", dest="extra_loss", type=float, nargs="+", default=None,
                        help="transmissões extras após o amplificador")
    common.add_argument("--tail-tol", dest="tail_tol", type=float, default=None,
                        help=f"massa de cauda tolerada (padrão {TAIL_TOL:.0e})")
    common.add_argument("--format", choices=["csv", "json"], default=None)
    common.add_argument("--output", default=None, help="arquivo de saída (padrão: stdout)")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--verify", action="store_true", default=None,
                        help="confere o resultado contra o oráculo de Fock")
    common.add_argument("--workers", type=int, default=None,
                        help="threads (Monte Carlo do bell; na varredura a recorrência segura o GIL e não acelera)")
    common.add_argument("--g", type=float, nargs="+", default=None, help="ganho(s) g = chi t")
    common.add_argument("-v", "--verbose", action="store_true")
    common.add_argument("-q", "--quiet", action="store_true")

    parser = argparse.ArgumentParser(prog="main.py", description="Detecção de estados micro-macro a olho nu.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", parents=[common], help="eps e V em função de <N_a>")
    p.add_argument("--n-mean-min", dest="n_mean_min", type=float, default=None)
    p.add_argument("--n-mean-max", dest="n_mean_max", type=float, default=None)
    p.add_argument("--points", type=int, default=None)

    sub.add_parser("witness", parents=[common], help="critério de separabilidade micro-macro")

    p = sub.add_parser("bell", parents=[common], help="CHSH pós-selecionado (analítico e Monte Carlo)")
    p.add_argument("--n-mean", dest="n_mean", type=float, default=None,
                   help=f"<N_a> do ponto de operação, se --g não for dado (padrão {BELL_N_MEAN:g})")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--events", default=None, help="grava o registro ensaio a ensaio (CSV)")

    p = sub.add_parser("verify", parents=[common], help="suítes de equivalência contra o oráculo")
    p.add_argument("--level", choices=["quick", "full"], default=None)
    p.add_argument("--inject-tolerance", dest="inject_tolerance", type=float, default=None,
                   help=argparse.SUPPRESS)

    p = sub.add_parser("response", parents=[common], help="curva de resposta do olho a pulsos coerentes")
    p.add_argument("--n-mean-min", dest="n_mean_min", type=float, default=None)
    p.add_argument("--n-mean-max", dest="n_mean_max", type=float, default=None)
    p.add_argument("--points", type=int, default=None)

    sub.add_parser("distribution", parents=[common], help="P(m) de |A0> e |A1> após as perdas")
    return parser


def _load_config(args) -> dict:
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config", "verbose", "quiet")}
    file_config = read_config(args.config) if args.config else {}
    return merge_config(file_config, flags)


def _detector(config) -> ThresholdDetector:
    try:
        theta = check_integer(config.get("theta", THETA), "theta")
        return ThresholdDetector(theta, float(config.get("eta", ETA_EYE)))
    except (TypeError, ValueError) as e:
        raise ConfigError(str(e)) from e


def _extra(config) -> float:
    """Transmissões extras em série (comandos de ponto único)."""
    try:
        return compose_transmission(as_tuple(config.get("extra_loss", 1.0)))
    except (TypeError, ValueError) as e:
        raise ConfigError(str(e)) from e


def _single_gain(config, default=None) -> GainParams:
    g = config.get("g", default)
    if g is None:
        raise ConfigError("informe --g")
    values = as_tuple(g)
    if len(values) != 1:
        raise ConfigError(f"este comando aceita um único ganho, recebido {list(values)}")
    return GainParams(values[0])


def _fmt(config) -> str:
    fmt = str(config.get("format", "csv")).lower()
    if fmt not in ("csv", "json"):
        raise ConfigError(f"Formato desconhecido: {fmt}")
    return fmt


def cmd_sweep(config) -> int:
    cfg = build_sweep_config(config)
    log.info("Varredura: %d ganhos x %d transmissões extras (theta=%d, eta=%.4g)",
             len(cfg.g_grid), len(cfg.extra_transmissions), cfg.theta, cfg.eta_eye)

    results = run_sweep(cfg)
    if results["failed"]:
        log.error(results["check"])
        return EXIT_NUMERICAL

    write_outputs(cfg.output, results["rows"], SWEEP_COLUMNS, cfg.fmt, results["summary"], SUMMARY_COLUMNS)
    log.info(results["check"])
    return EXIT_OK


def cmd_witness(config) -> int:
    try:
        eta = compose_transmission([float(config.get("eta", ETA_EYE)), _extra(config)])
    except (TypeError, ValueError) as e:
        raise ConfigError(str(e)) from e
    loss = LossChannel(eta)
    gains = [GainParams(g) for g in as_tuple(config.get("g", 1.0))]
    check = bool(config.get("verify", False))

    rows = []
    status = EXIT_OK
    for gain in gains:
        report = witness_closed_form(gain, loss)
        row = {"g": gain.g, "eta": eta, "jz_sz": report.jz_sz, "jx_sx": report.jx_sx, "jy_sy": report.jy_sy,
               "n_a": report.n_a, "lhs": report.lhs, "rhs": report.rhs, "margin": report.margin,
               "violated": report.violated}
        if check:
            if gain.g > WITNESS_ORACLE_G_MAX:
                raise ConfigError(f"--verify exige g <= {WITNESS_ORACLE_G_MAX}, recebido {gain.g}")
            ref = witness_oracle(gain, loss)
            dev = max(abs(report.jz_sz - ref.jz_sz), abs(report.jx_sx - ref.jx_sx),
                      abs(report.jy_sy - ref.jy_sy), abs(report.n_a - ref.n_a), abs(report.margin - ref.margin))
            row["oracle_deviation"] = dev
            if dev > WITNESS_ORACLE_TOL:
                log.error("FALHA testemunha g=%.6g eta=%.6g: desvio do oráculo %.2e > %.0e",
                          gain.g, eta, dev, WITNESS_ORACLE_TOL)
                status = EXIT_CHECK
            else:
                log.info("✅ testemunha g=%.6g confere com o oráculo (desvio %.2e)", gain.g, dev)
        rows.append(row)

    columns = WITNESS_COLUMNS + (["oracle_deviation"] if check else [])
    write_outputs(config.get("output"), rows, columns, _fmt(config))
    return status


def cmd_bell(config) -> int:
    detector = _detector(config)
    extra = _extra(config)
    if config.get("g") is not None:
        gain = _single_gain(config)
    else:
        gain = gain_from_mean_photons(float(config.get("n_mean", BELL_N_MEAN)))
    n_trials = check_integer(config.get("trials", BELL_TRIALS), "trials")
    seed = check_integer(config.get("seed", 0), "seed")
    tail_tol = float(config.get("tail_tol", TAIL_TOL))

    stats = joint_stats(gain, detector, extra, tail_tol)
    if stats.visibility_defined:
        s_analytic = chsh_value(stats.visibility)
    else:
        log.warning("Visibilidade indefinida em g=%.6g: S analítico indisponível", gain.g)
        s_analytic = None

    est = simulate_trials(n_trials, stats, rng_seed=seed, workers=check_integer(config.get("workers", 1), "workers"))
    row = {
        "g": gain.g, "N_mean": total_mean_photons(gain), "eta_total": stats.eta_total,
        "epsilon": stats.epsilon, "V": stats.visibility, "S_analytic": s_analytic,
        "S_mc": est.s_value, "se": est.std_error, "conclusive_rate": est.conclusive_rate,
        "n_trials": est.n_trials, "n_conclusive": est.n_conclusive,
    }
    write_outputs(config.get("output"), [row], BELL_COLUMNS, _fmt(config))

    if config.get("events"):
        events = [dataclasses.asdict(e) for e in outcomes(n_trials, stats, rng_seed=seed)]
        write_outputs(config["events"], events, EVENT_COLUMNS, "csv")
    return EXIT_OK


def cmd_verify(config) -> int:
    level = str(config.get("level", "quick"))
    scale = config.get("inject_tolerance")
    results = run_verify(level, tolerance_scale=1.0 if scale is None else float(scale))

    rows = [{"check": r.name, "passed": r.passed, "deviation": r.deviation, "tolerance": r.tolerance}
            for r in results]
    write_outputs(config.get("output"), rows, VERIFY_COLUMNS, _fmt(config))

    failed = [r.name for r in results if not r.passed]
    if failed:
        log.error("%d verificação(ões) falharam: %s", len(failed), "; ".join(failed))
        return EXIT_CHECK
    log.info("✅ %d verificações (%s) aprovadas.", len(results), level)
    return EXIT_OK


def cmd_response(config) -> int:
    detector = _detector(config)
    n_min = float(config.get("n_mean_min", 1.0))
    n_max = float(config.get("n_mean_max", 1.0e4))
    points = check_integer(config.get("points", 200), "points")
    if not (0.0 < n_min <= n_max) or points < 1:
        raise ConfigError(f"Grade inválida: n_mean_min={n_min}, n_mean_max={n_max}, points={points}")

    n_mean = np.geomspace(n_min, n_max, points)
    p_yes = np.atleast_1d(eye_response(n_mean, detector))
    if p_yes[0] < 0.5 <= p_yes[-1]:
        log.info("Resposta de 50%% em ~%.1f fótons (theta=%d, eta=%.4g)",
                 float(np.interp(0.5, p_yes, n_mean)), detector.theta, detector.eta_eye)

    rows = [{"n_mean": float(n), "p_yes": float(p)} for n, p in zip(n_mean, p_yes)]
    write_outputs(config.get("output"), rows, RESPONSE_COLUMNS, _fmt(config))
    return EXIT_OK


def cmd_distribution(config) -> int:
    detector = _detector(config)
    gain = _single_gain(config, default=1.0)
    loss = LossChannel(compose_transmission([detector.eta_eye, _extra(config)]))
    dist0, dist1 = certified_distributions(gain, loss, float(config.get("tail_tol", TAIL_TOL)))
    log.info("m_max=%d, cauda |A0> %.2e, |A1> %.2e", dist0.m_max, dist0.tail_bound, dist1.tail_bound)

    p0, p1 = dist0.clamped(), dist1.clamped()
    rows = [{"m": m, "p_A0": float(p0[m]), "p_A1": float(p1[m])} for m in range(dist0.m_max + 1)]
    write_outputs(config.get("output"), rows, DISTRIBUTION_COLUMNS, _fmt(config))
    return EXIT_OK


COMMANDS = {
    "sweep": cmd_sweep,
    "witness": cmd_witness,
    "bell": cmd_bell,
    "verify": cmd_verify,
    "response": cmd_response,
    "distribution": cmd_distribution,
}


def main(argv=None) -> int:
    # Captura interrupção (CTRL+C)
    signal.signal(signal.SIGINT, signal_handler)

    args = build_parser().parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)

    try:
        config = _load_config(args)
        return COMMANDS[args.command](config)
    except ConfigError as e:
        log.error("Configuração inválida: %s", e)
        return EXIT_USAGE
    except ArithmeticError as e:
        # TruncationError e probabilidades negativas além do arredondamento
        log.error("Falha numérica: %s", e)
        return EXIT_NUMERICAL
    except ValueError as e:
        log.error("Parâmetro inválido: %s", e)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
