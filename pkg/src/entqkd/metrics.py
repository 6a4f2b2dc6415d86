"""QKD figures of merit: sifted-bit statistics and eavesdropper entropy.

A trial survives sifting when Alice and Bob each register exactly one
detection; two of the four surviving outcomes carry matching bits.  The
eavesdropper's ignorance about the error-free bits is scored by the binary
Renyi entropy of her conditional probability Ev(k, m), averaged over her
photon-count outcomes (k, m).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .detection import (CORRECT_1, CORRECT_2, ERROR_1, ERROR_2, DetectorParams,
                        TapParams, t_value, t_value_km, t_value_km_table)
from .gfunctions import Custom, EnergyDistribution, FixedN, Poisson
from .kernel import XiTable, ZetaSpec

# Truncation of the (k, m) entropy average for Poisson energies.
KMAX_OFFSET = 16
KMAX_SLOPE = 3.0


@dataclass(frozen=True)
class QkdMetrics:
    """Per-point figures of merit.

    ``p_sift_err`` is None when no outcome survives sifting; ``av_ent`` is
    None when there are no error-free bits to average over.  ``fig_merit``
    is p_good * av_ent (None when av_ent is undefined).
    """

    p_good: float
    p_sift_err: float | None
    av_ent: float | None
    fig_merit: float | None


def default_kmax(dist: EnergyDistribution) -> int:
    """Truncation cap for the (k, m) average: ceil(16 + 3 mu) for Poisson."""
    if isinstance(dist, Poisson):
        return int(math.ceil(KMAX_OFFSET + KMAX_SLOPE * dist.mu))
    if isinstance(dist, FixedN):
        return dist.n
    if isinstance(dist, Custom):
        return len(dist.weights) - 1
    raise TypeError(f"unsupported energy distribution {dist!r}")


def sift_metrics(dist: EnergyDistribution, zeta: ZetaSpec, det: DetectorParams,
                 tap: TapParams, xi: XiTable,
                 basis_match_factor: bool = False) -> tuple[float, float | None]:
    """Probability of a correct sifted bit and the sifted error rate.

    Returns (p_good, p_sift_err); p_sift_err is None when all four sifted
    outcomes have probability 0.  With ``basis_match_factor`` the 1/2
    basis-agreement probability multiplies p_good.
    """
    p_correct = (t_value(dist, zeta, CORRECT_1, det, tap, xi)
                 + t_value(dist, zeta, CORRECT_2, det, tap, xi))
    p_err = (t_value(dist, zeta, ERROR_1, det, tap, xi)
             + t_value(dist, zeta, ERROR_2, det, tap, xi))
    p_good = 0.5 * p_correct if basis_match_factor else p_correct
    sifted = p_correct + p_err
    if sifted <= 0.0:
        return p_good, None
    return p_good, p_err / sifted


def ev_probability(k: int, m: int, dist: EnergyDistribution, zeta: ZetaSpec,
                   det: DetectorParams, tap: TapParams,
                   xi: XiTable) -> float | None:
    """Probability that Bob's bit is 1 given eavesdropper counts (k, m).

    None when both correct-outcome probabilities vanish at (k, m).
    """
    t1 = t_value_km(dist, zeta, CORRECT_1, k, m, det, tap, xi)
    t2 = t_value_km(dist, zeta, CORRECT_2, k, m, det, tap, xi)
    if t1 + t2 <= 0.0:
        return None
    return t1 / (t1 + t2)


def renyi_entropy(p: float, order: float) -> float:
    """Binary Renyi entropy log2(p^R + (1-p)^R) / (1 - R) in bits.

    Clamped into [0, 1]; p in {0, 1} gives 0 and p = 1/2 gives 1.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p={p!r} outside [0, 1]")
    if not order > 0.0 or order == 1.0:
        raise ValueError(f"Renyi order must be positive and != 1, got {order!r}")
    value = math.log2(p ** order + (1.0 - p) ** order) / (1.0 - order)
    return min(max(value, 0.0), 1.0)


def average_entropy(dist: EnergyDistribution, zeta: ZetaSpec, det: DetectorParams,
                    tap: TapParams, xi: XiTable, order: float,
                    kmax: int | None = None) -> float | None:
    """Eavesdropper's average Renyi entropy on error-free bits.

    Sum over (k, m) with k + m <= kmax of the joint correct-outcome weight
    times the entropy of Ev(k, m), normalized by the total correct-outcome
    probability.  (k, m) terms with zero weight are skipped; None when the
    normalization vanishes.  The ratio is clamped into [0, 1]: the numerator
    is a truncation of the denominator computed along a different summation
    path, so roundoff can push the quotient a few ulp past 1.
    """
    if kmax is None:
        kmax = default_kmax(dist)
    denom = (t_value(dist, zeta, CORRECT_1, det, tap, xi)
             + t_value(dist, zeta, CORRECT_2, det, tap, xi))
    if denom <= 0.0:
        return None
    t1 = t_value_km_table(dist, zeta, CORRECT_1, det, tap, xi, kmax)
    t2 = t_value_km_table(dist, zeta, CORRECT_2, det, tap, xi, kmax)
    numer = 0.0
    for k in range(kmax + 1):
        for m in range(kmax - k + 1):
            weight = float(t1[k, m] + t2[k, m])
            if weight > 0.0:
                numer += weight * renyi_entropy(float(t1[k, m]) / weight, order)
    return min(max(numer / denom, 0.0), 1.0)


def qkd_metrics(dist: EnergyDistribution, zeta: ZetaSpec, det: DetectorParams,
                tap: TapParams, xi: XiTable, order: float,
                kmax: int | None = None,
                basis_match_factor: bool = False) -> QkdMetrics:
    """Assemble all per-point figures of merit."""
    p_good, p_sift_err = sift_metrics(dist, zeta, det, tap, xi,
                                      basis_match_factor=basis_match_factor)
    av_ent = average_entropy(dist, zeta, det, tap, xi, order, kmax=kmax)
    fig_merit = None if av_ent is None else p_good * av_ent
    return QkdMetrics(p_good=p_good, p_sift_err=p_sift_err,
                      av_ent=av_ent, fig_merit=fig_merit)
