"""Frequency-entanglement scalars kappa(zeta, n) and the Xi(zeta, n) tables.

The two-frequency Gaussian kernel enters every detection probability through
a single family of loop scalars kappa(zeta, n).  kappa is evaluated through
the rational recursion

    R(zeta, 2) = 1,   R(zeta, n+1) = 1 / (1 - zeta^2 R(zeta, n) / (4 (zeta^2+1))),
    kappa(zeta, 1) = 1,   kappa(zeta, n) = R(zeta, n) / sqrt(zeta^2 + 1),

which climbs monotonically to the limit 2 / (sqrt(zeta^2+1) + 1).  The
vacuum-overlap function Xi(zeta, n) is the partition sum

    Xi(zeta, n) = sum over multiplicity vectors nu of
                  n! / prod_j (j^nu_j nu_j!) * prod_j kappa(zeta, j)^nu_j,

which interpolates between n! (zeta = 0, no frequency entanglement) and 1
(extreme entanglement).  Values of zeta at or above ``inf_threshold`` are
treated as the extreme-entanglement limit, where kappa(zeta, n>=2) = 0 and
Xi = 1 exactly.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import ConfigurationError
from .partitions import PartitionTable

DEFAULT_INF_THRESHOLD = 1e40


class Regime(enum.Enum):
    """Evaluation regime selected by the magnitude of zeta."""

    CASE_I = "case-i"        # zeta == 0: no frequency entanglement
    GENERAL = "general"      # finite nonzero zeta below the infinity threshold
    CASE_II = "case-ii"      # zeta at or beyond the threshold (treated as infinite)


@dataclass(frozen=True)
class ZetaSpec:
    """A frequency-entanglement parameter and its evaluation regime.

    Negative values are accepted; every computed quantity depends on zeta
    only through zeta^2, so the magnitude is used throughout.
    """

    value: float
    inf_threshold: float = DEFAULT_INF_THRESHOLD

    def __post_init__(self) -> None:
        if math.isnan(self.value):
            raise ValueError("zeta must not be NaN")
        if not self.inf_threshold > 0:
            raise ValueError("inf_threshold must be positive")

    @property
    def magnitude(self) -> float:
        return abs(self.value)

    @property
    def regime(self) -> Regime:
        if self.magnitude == 0.0:
            return Regime.CASE_I
        if self.magnitude >= self.inf_threshold:
            return Regime.CASE_II
        return Regime.GENERAL

    @property
    def label(self) -> str:
        """Serialization label: '0', the decimal value, or 'inf'."""
        if self.regime is Regime.CASE_I:
            return "0"
        if self.regime is Regime.CASE_II:
            return "inf"
        text = repr(self.magnitude)
        return text[:-2] if text.endswith(".0") else text

    @classmethod
    def parse(cls, token: str, inf_threshold: float = DEFAULT_INF_THRESHOLD) -> "ZetaSpec":
        token = token.strip().lower()
        if token in ("inf", "infinity"):
            return cls(math.inf, inf_threshold)
        try:
            return cls(float(token), inf_threshold)
        except ValueError as exc:
            raise ValueError(f"cannot parse zeta value {token!r}") from exc


@lru_cache(maxsize=None)
def factorials(n_cap: int) -> np.ndarray:
    """float64 lookup of 0!..n_cap! (read-only)."""
    out = np.array([float(math.factorial(n)) for n in range(n_cap + 1)])
    out.flags.writeable = False
    return out


@lru_cache(maxsize=None)
def inverse_factorials(n_cap: int) -> np.ndarray:
    out = 1.0 / factorials(n_cap)
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class KappaTable:
    """kappa(zeta, n) for n = 1..n_cap; index 0 is unused (NaN)."""

    zeta: ZetaSpec
    values: np.ndarray

    @property
    def n_cap(self) -> int:
        return len(self.values) - 1

    def value(self, n: int) -> float:
        if not 1 <= n <= self.n_cap:
            raise IndexError(f"n={n} outside 1..{self.n_cap}")
        return float(self.values[n])


def compute_kappa(zeta: ZetaSpec, n_cap: int) -> KappaTable:
    """Evaluate kappa(zeta, n) for n = 1..n_cap via the R recursion.

    In the extreme-entanglement regime kappa is 0 for n >= 2.  At zeta = 0
    the recursion collapses to kappa = 1 exactly for every n.
    """
    if n_cap < 1:
        raise ValueError(f"n_cap must be >= 1, got {n_cap}")
    values = np.full(n_cap + 1, math.nan)
    values[1] = 1.0
    if zeta.regime is Regime.CASE_II:
        values[2:] = 0.0
        return KappaTable(zeta=zeta, values=values)
    zsq = zeta.magnitude * zeta.magnitude
    root = math.sqrt(zsq + 1.0)
    p = zsq / (4.0 * (zsq + 1.0))
    r = 1.0
    for n in range(2, n_cap + 1):
        values[n] = r / root
        r = 1.0 / (1.0 - p * r)
    return KappaTable(zeta=zeta, values=values)


def kappa_limit(zeta: ZetaSpec) -> float:
    """Large-n limit of kappa(zeta, n)."""
    return 2.0 / (math.sqrt(zeta.magnitude ** 2 + 1.0) + 1.0)


@dataclass(frozen=True, eq=False)
class XiTable:
    """Xi(zeta, n) for each requested zeta and n = 0..n_cap.

    ``xi[i, n]`` is Xi for ``zeta_list[i]``.  ``ratios`` holds Xi(n)/n!,
    the numerically convenient form (bounded by 1 from above for every
    regime).  Rows for zeta = 0 and zeta = infinity are exact by regime
    dispatch and are also synthesized on demand for specs not present in
    ``zeta_list``.
    """

    zeta_list: tuple[ZetaSpec, ...]
    n_cap: int
    xi: np.ndarray
    ratios: np.ndarray
    _index: dict = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        for i, spec in enumerate(self.zeta_list):
            self._index.setdefault(spec.magnitude, i)

    def _row_index(self, zeta: ZetaSpec) -> int | None:
        return self._index.get(zeta.magnitude)

    def ratio_row(self, zeta: ZetaSpec) -> np.ndarray:
        """Xi(zeta, n)/n! for n = 0..n_cap."""
        i = self._row_index(zeta)
        if i is not None:
            return self.ratios[i]
        if zeta.regime is Regime.CASE_I:
            return np.ones(self.n_cap + 1)
        if zeta.regime is Regime.CASE_II:
            return inverse_factorials(self.n_cap).copy()
        raise ConfigurationError(
            f"zeta={zeta.value!r} not present in the Xi table "
            f"(available: {[s.value for s in self.zeta_list]})")

    def row(self, zeta: ZetaSpec) -> np.ndarray:
        """Xi(zeta, n) for n = 0..n_cap."""
        i = self._row_index(zeta)
        if i is not None:
            return self.xi[i]
        return self.ratio_row(zeta) * factorials(self.n_cap)


def compute_xi(zeta_list: list[ZetaSpec] | tuple[ZetaSpec, ...], n_cap: int,
               parts: PartitionTable) -> XiTable:
    """Build Xi(zeta, n) for every zeta in ``zeta_list`` and n = 0..n_cap.

    The zeta = 0 rows are exactly n! and extreme-entanglement rows are
    exactly 1, by regime dispatch; general rows are evaluated as partition
    sums over the kappa table.
    """
    if n_cap < 1:
        raise ValueError(f"n_cap must be >= 1, got {n_cap}")
    if parts.n_cap < n_cap:
        raise ConfigurationError(
            f"partition table covers n <= {parts.n_cap}, need n_cap={n_cap}")
    specs = tuple(zeta_list)
    fact = factorials(n_cap)
    inv_fact = inverse_factorials(n_cap)
    ratios = np.empty((len(specs), n_cap + 1))
    xi = np.empty((len(specs), n_cap + 1))
    for i, spec in enumerate(specs):
        if spec.regime is Regime.CASE_I:
            ratios[i] = 1.0
            xi[i] = fact
        elif spec.regime is Regime.CASE_II:
            ratios[i] = inv_fact
            xi[i] = 1.0
        else:
            ratios[i] = _general_ratio_row(spec, n_cap, parts, inv_fact)
            xi[i] = ratios[i] * fact
    return XiTable(zeta_list=specs, n_cap=n_cap, xi=xi, ratios=ratios)


def _general_ratio_row(zeta: ZetaSpec, n_cap: int, parts: PartitionTable,
                       inv_fact: np.ndarray) -> np.ndarray:
    """Xi(zeta, n)/n! = sum over partitions of prod_j (kappa_j/j)^nu_j / nu_j!."""
    kap = compute_kappa(zeta, n_cap).values
    row = np.ones(n_cap + 1)
    for n in range(2, n_cap + 1):
        exps = np.asarray(parts.per_n[n], dtype=np.int64)
        base = kap[1:n + 1] / np.arange(1, n + 1)
        terms = np.prod(base[None, :] ** exps, axis=1)
        terms *= np.prod(inv_fact[exps], axis=1)
        row[n] = terms.sum()
    return row
