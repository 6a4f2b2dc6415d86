"""Numerical model of a polarization-entangled QKD link under a beam-splitter tap.

Computes detector-outcome probabilities, the sifted-bit error rate, and the
eavesdropper's average Renyi entropy as functions of the pulse energy mu and
the frequency-entanglement parameter zeta.
"""

from .errors import CacheFormatError, ConfigurationError, ModelError
from .partitions import PartitionTable, enumerate_partitions, load_partitions, save_partitions
from .kernel import (DEFAULT_INF_THRESHOLD, KappaTable, Regime, XiTable, ZetaSpec,
                     compute_kappa, compute_xi, kappa_limit)
from .gfunctions import (Custom, EnergyDistribution, FixedN, KernelArgs,
                         NormFactorCache, Poisson, g_custom, g_custom_km, g_mu,
                         g_mu_km, g_n, g_nkm)
from .detection import (ALL_OUTCOMES, CORRECT_1, CORRECT_2, ERROR_1, ERROR_2,
                        DetectorParams, OutcomeCode, TapParams, clamp_diagnostics,
                        f_value, kernel_args, t_value, t_value_km, t_value_km_table)
from .metrics import QkdMetrics, average_entropy, ev_probability, qkd_metrics, renyi_entropy, sift_metrics
from .sweep import (ModelParams, MuGrid, SweepResult, SweepRow, evaluate_point,
                    read_csv, required_n_cap, run_sweep, write_csv)

__version__ = "0.1.0"
