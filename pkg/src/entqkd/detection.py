"""Detector outcomes and their probabilities.

An outcome over the four binary-detection modes (a1, a2, b1, b2) is coded
as a 4-bit vector with 1 = barred (no detect) and 0 = detect.  The
probability of an outcome is an inclusion-exclusion sum over all ways of
"filling in zeros": every detect position is completed with 0 or 1, each
completion contributing a signed no-detect block F with its dark-count
factors and a kernel evaluated at efficiency-substituted arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from . import gfunctions as gf
from .errors import ConfigurationError, ModelError
from .gfunctions import Custom, EnergyDistribution, FixedN, KernelArgs, Poisson
from .kernel import XiTable, ZetaSpec

MODE_LABELS = ("a1", "a2", "b1", "b2")

# Negative t values larger than this magnitude indicate a model bug rather
# than roundoff; smaller ones are clamped to 0 and recorded.
NEGATIVE_CLAMP_LIMIT = 1e-8


@dataclass(frozen=True)
class DetectorParams:
    """Per-mode detector efficiencies, transmissions, and dark-count rates.

    Entries are ordered (a1, a2, b1, b2).  Transmission on the a modes is
    conventionally 1; attenuation applies to the light sent toward b.
    """

    eta_det: tuple[float, float, float, float]
    eta_trans: tuple[float, float, float, float]
    p_dark: tuple[float, float, float, float]

    def __post_init__(self) -> None:
        for name in ("eta_det", "eta_trans", "p_dark"):
            values = tuple(float(v) for v in getattr(self, name))
            if len(values) != 4:
                raise ValueError(f"{name} must have 4 entries, got {len(values)}")
            object.__setattr__(self, name, values)
        for i in range(4):
            if not 0.0 <= self.eta_det[i] <= 1.0:
                raise ValueError(f"eta_det[{i}]={self.eta_det[i]!r} outside [0, 1]")
            if not 0.0 <= self.eta_trans[i] <= 1.0:
                raise ValueError(f"eta_trans[{i}]={self.eta_trans[i]!r} outside [0, 1]")
            if not 0.0 <= self.p_dark[i] < 1.0:
                raise ValueError(f"p_dark[{i}]={self.p_dark[i]!r} outside [0, 1)")

    @property
    def alpha0(self) -> tuple[float, float, float, float]:
        """No-detect substitution per mode: 1 - eta_det * eta_trans."""
        return tuple(1.0 - d * t for d, t in zip(self.eta_det, self.eta_trans))


@dataclass(frozen=True)
class TapParams:
    """Eavesdropper coupler: fraction vsq of b-bound energy is tapped off."""

    vsq: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.vsq <= 1.0:
            raise ValueError(f"vsq={self.vsq!r} outside [0, 1]")

    @property
    def usq(self) -> float:
        return 1.0 - self.vsq


@dataclass(frozen=True)
class OutcomeCode:
    """4-bit vector over (a1, a2, b1, b2); 1 = barred (no detect), 0 = detect."""

    bits: tuple[int, int, int, int]

    def __post_init__(self) -> None:
        bits = tuple(int(b) for b in self.bits)
        if len(bits) != 4 or any(b not in (0, 1) for b in bits):
            raise ValueError(f"outcome must be 4 bits of 0/1, got {self.bits!r}")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_string(cls, text: str) -> "OutcomeCode":
        return cls(tuple(int(c) for c in text.strip()))

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)

    @property
    def barred(self) -> tuple[int, ...]:
        """Indices of no-detect modes (the J0 set)."""
        return tuple(i for i, b in enumerate(self.bits) if b == 1)

    @property
    def detected(self) -> tuple[int, ...]:
        """Indices of detect modes (the J1 set)."""
        return tuple(i for i, b in enumerate(self.bits) if b == 0)


# The four outcomes that survive sifting.  Bob reads detect-on-b1 as a 1-bit
# and Alice reads detect-on-a2 as a 1-bit, so the two matching-bit outcomes
# are correct and the two mismatched ones are errors.
CORRECT_1 = OutcomeCode.from_string("1001")   # a1 barred, a2 det, b1 det, b2 barred
CORRECT_2 = OutcomeCode.from_string("0110")   # a1 det, a2 barred, b1 barred, b2 det
ERROR_1 = OutcomeCode.from_string("1010")     # a2 det with b2 det: mismatched
ERROR_2 = OutcomeCode.from_string("0101")     # a1 det with b1 det: mismatched

ALL_OUTCOMES = tuple(OutcomeCode(bits) for bits in product((0, 1), repeat=4))


@dataclass
class ClampDiagnostics:
    """Counts how often a tiny negative t value was clamped to zero."""

    count: int = 0
    max_magnitude: float = 0.0

    def record(self, magnitude: float) -> None:
        self.count += 1
        if magnitude > self.max_magnitude:
            self.max_magnitude = magnitude

    def reset(self) -> None:
        self.count = 0
        self.max_magnitude = 0.0


clamp_diagnostics = ClampDiagnostics()


def kernel_args(barred: OutcomeCode, det: DetectorParams, tap: TapParams) -> KernelArgs:
    """Kernel arguments for the no-detect set coded by ``barred``.

    Modes in the set get their alpha0 substitution, all others 1; then
    w = a(a1) a(b2) usq, x = a(a1) vsq, y = a(a2) a(b1) usq, z = a(a2) vsq.
    """
    alpha0 = det.alpha0
    a = [alpha0[i] if barred.bits[i] else 1.0 for i in range(4)]
    usq = tap.usq
    return KernelArgs(w=a[0] * a[3] * usq, x=a[0] * tap.vsq,
                      y=a[1] * a[2] * usq, z=a[1] * tap.vsq)


def _g_value(dist: EnergyDistribution, zeta: ZetaSpec, args: KernelArgs,
             xi: XiTable, km: tuple[int, int] | None) -> float:
    if isinstance(dist, Poisson):
        if km is None:
            return gf.g_mu(zeta, dist.mu, args, xi)
        return gf.g_mu_km(zeta, dist.mu, km[0], km[1], args, xi)
    if isinstance(dist, FixedN):
        if km is None:
            return gf.g_n(zeta, dist.n, args, xi)
        return gf.g_nkm(zeta, dist.n, km[0], km[1], args, xi)
    if isinstance(dist, Custom):
        if km is None:
            return gf.g_custom(dist, zeta, args, xi)
        return gf.g_custom_km(dist, zeta, km[0], km[1], args, xi)
    raise TypeError(f"unsupported energy distribution {dist!r}")


def f_value(dist: EnergyDistribution, zeta: ZetaSpec, barred: OutcomeCode,
            det: DetectorParams, tap: TapParams, xi: XiTable,
            km: tuple[int, int] | None = None) -> float:
    """Signed no-detect block for the mode set coded by ``barred``.

    (-1)^|L| times the product of (1 - p_dark) over the set, times the
    matching kernel at the substituted arguments.  With ``km`` given, the
    (k, m)-resolved kernel is used.
    """
    sign = -1.0 if len(barred.barred) % 2 else 1.0
    g = _g_value(dist, zeta, kernel_args(barred, det, tap), xi, km)
    return sign * _dark_product(barred, det) * g


def _dark_product(barred: OutcomeCode, det: DetectorParams) -> float:
    # grouped per mode pair so relabeling 1 <-> 2 permutes commuting factors
    bits = barred.bits
    pair_a = ((1.0 - det.p_dark[0]) if bits[0] else 1.0) * \
             ((1.0 - det.p_dark[1]) if bits[1] else 1.0)
    pair_b = ((1.0 - det.p_dark[2]) if bits[2] else 1.0) * \
             ((1.0 - det.p_dark[3]) if bits[3] else 1.0)
    return pair_a * pair_b


def completions(outcome: OutcomeCode) -> list[OutcomeCode]:
    free = outcome.detected
    out = []
    for fill in product((0, 1), repeat=len(free)):
        bits = list(outcome.bits)
        for i, b in zip(free, fill):
            bits[i] = b
        out.append(OutcomeCode(tuple(bits)))
    return out


def _clamp(value: float, context: str) -> float:
    if value >= 0.0:
        return value
    if value < -NEGATIVE_CLAMP_LIMIT:
        raise ModelError(f"probability {value!r} below -{NEGATIVE_CLAMP_LIMIT} for {context}")
    clamp_diagnostics.record(-value)
    return 0.0


def t_value(dist: EnergyDistribution, zeta: ZetaSpec, outcome: OutcomeCode,
            det: DetectorParams, tap: TapParams, xi: XiTable) -> float:
    """Probability of ``outcome``, marginal over the eavesdropper counts.

    (-1)^|J0| times the sum of ``f_value`` over all completions of the
    detect positions.  Tiny negative roundoff is clamped to 0 (recorded in
    ``clamp_diagnostics``); anything below -1e-8 raises ModelError.
    """
    sign = -1.0 if len(outcome.barred) % 2 else 1.0
    total = math.fsum(f_value(dist, zeta, comp, det, tap, xi)
                      for comp in completions(outcome))
    return _clamp(sign * total, f"t_value({outcome})")


def t_value_km(dist: EnergyDistribution, zeta: ZetaSpec, outcome: OutcomeCode,
               k: int, m: int, det: DetectorParams, tap: TapParams,
               xi: XiTable) -> float:
    """Probability of ``outcome`` jointly with eavesdropper counts (k, m)."""
    sign = -1.0 if len(outcome.barred) % 2 else 1.0
    total = math.fsum(f_value(dist, zeta, comp, det, tap, xi, km=(k, m))
                      for comp in completions(outcome))
    return _clamp(sign * total, f"t_value_km({outcome}, k={k}, m={m})")


def _weight_vector(dist: EnergyDistribution, xi: XiTable) -> np.ndarray:
    if isinstance(dist, Poisson):
        n_top = gf.poisson_cutoff(dist.mu, xi.n_cap)
        return gf.poisson_weights(dist.mu, n_top)
    if isinstance(dist, FixedN):
        if dist.n > xi.n_cap:
            raise ConfigurationError(
                f"n={dist.n} exceeds the table cap n_cap={xi.n_cap}")
        out = np.zeros(dist.n + 1)
        out[dist.n] = 1.0
        return out
    if isinstance(dist, Custom):
        return gf._weights_of(dist, xi)
    raise TypeError(f"unsupported energy distribution {dist!r}")


def t_value_km_table(dist: EnergyDistribution, zeta: ZetaSpec, outcome: OutcomeCode,
                     det: DetectorParams, tap: TapParams, xi: XiTable,
                     kmax: int) -> np.ndarray:
    """All t_value_km(outcome, k, m) with k + m <= kmax in one array.

    Bulk counterpart of :func:`t_value_km` used by the entropy average; the
    same completion sum is evaluated on whole (k, m) tables.
    """
    weights = _weight_vector(dist, xi)
    sign = -1.0 if len(outcome.barred) % 2 else 1.0
    total = np.zeros((kmax + 1, kmax + 1))
    for comp in completions(outcome):
        csign = -1.0 if len(comp.barred) % 2 else 1.0
        table = gf.g_km_table(zeta, weights, kernel_args(comp, det, tap), xi, kmax)
        total += csign * _dark_product(comp, det) * table
    total *= sign
    low = total.min()
    if low < 0.0:
        if low < -NEGATIVE_CLAMP_LIMIT:
            raise ModelError(
                f"probability {low!r} below -{NEGATIVE_CLAMP_LIMIT} for "
                f"t_value_km_table({outcome})")
        clamp_diagnostics.record(-low)
        np.clip(total, 0.0, None, out=total)
    return total
