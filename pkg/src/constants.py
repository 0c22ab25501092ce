# Modelo do olho (detector de limiar precedido de perdas)
THETA    = 7
ETA_EYE  = 0.08

# Truncamento das séries
TAIL_TOL    = 1e-12
M_MAX_CAP   = 2_000_000
TAIL_WINDOW = 32
NEG_CLAMP   = 1e-14
MEAN_TAIL_WARN = 1e-9

# Oráculo de Fock
ORACLE_TRUNC_TOL  = 1e-12
ORACLE_TRUNC_FAIL = 1e-9
ORACLE_MIN_TRUNC  = 64
PHASE_CHECK_TRUNC = 30

# Varredura (eixo x = <N_a> = 4 sinh^2 g + 1)
N_MEAN_MIN = 2.0
N_MEAN_MAX = 2.0e4
N_GRID     = 200
EXTRA_TRANSMISSIONS = (1.0, 0.5, 0.25)

# Visibilidade indefinida quando eps < EPS_UNDEFINED
EPS_UNDEFINED = 1e-15

# Monte Carlo (blocos de tamanho fixo => resultado independe do nº de workers)
MC_BLOCK = 1 << 16

# Saída
CSV_DIGITS = 12
SWEEP_COLUMNS = ["g", "N_mean", "epsilon", "V", "p_yn", "p_ny", "p_yy", "p_nn", "eta_total"]

# Códigos de saída do CLI
EXIT_OK        = 0
EXIT_CHECK     = 1
EXIT_USAGE     = 2
EXIT_NUMERICAL = 3
SUMMARY_COLUMNS = ["eta_total", "extra_transmission", "epsilon_max", "N_mean_at_max", "g_at_max",
                   "V_at_max", "V_min", "N_mean_at_V_min"]
WITNESS_COLUMNS = ["g", "eta", "jz_sz", "jx_sx", "jy_sy", "n_a", "lhs", "rhs", "margin", "violated"]
BELL_COLUMNS = ["g", "N_mean", "eta_total", "epsilon", "V", "S_analytic", "S_mc", "se",
                "conclusive_rate", "n_trials", "n_conclusive"]
EVENT_COLUMNS = ["trial_id", "basis_a", "basis_b", "result_a", "result_b"]
VERIFY_COLUMNS = ["check", "passed", "deviation", "tolerance"]
RESPONSE_COLUMNS = ["n_mean", "p_yes"]
DISTRIBUTION_COLUMNS = ["m", "p_A0", "p_A1"]

# bell: ponto padrão = máximo de eps da curva eta_total = 0.08
BELL_N_MEAN = 288.0
BELL_TRIALS = 1_000_000

# witness --verify
WITNESS_ORACLE_TOL = 1e-8
WITNESS_ORACLE_G_MAX = 1.25
