"""The G-function hierarchy: detector-response kernels in (w, x, y, z).

``g_nkm`` is the joint kernel for an n-photon pulse with the eavesdropper
counting (k, m) photons; ``g_n`` marginalizes over (k, m); ``g_mu`` and
``g_mu_km`` are their Poisson-weighted counterparts, and ``g_custom`` /
``g_custom_km`` accept an arbitrary photon-number distribution.  Every
function dispatches on the zeta regime:

* zeta = 0: closed forms (the (k, m)-resolved kernel is a terminating
  Gauss-hypergeometric polynomial);
* finite zeta: Xi-weighted sums from :class:`entqkd.kernel.XiTable`;
* extreme entanglement: closed forms with Xi = 1.

The zeta = 0 closed forms are evaluated in cancellation-free arrangements
(a geometric sum instead of a power-difference quotient, expm1 instead of a
difference of exponentials), so the degenerate direction y+z == w+x needs
no special tolerance: the exact-equality branch is the analytic limit.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Union
from weakref import WeakKeyDictionary

import numpy as np

from .errors import ConfigurationError
from .kernel import Regime, XiTable, ZetaSpec, factorials, inverse_factorials

# Poisson sums truncate at floor(3 mu + 16); the tail beyond that is far
# below every tolerance used here for mu up to a few photons.
TRUNCATION_SLOPE = 3.0
TRUNCATION_OFFSET = 16
POISSON_TAIL_LIMIT = 1e-9


@dataclass(frozen=True)
class KernelArgs:
    """Arguments (w, x, y, z) of the detection kernels, each in [0, 1]."""

    w: float
    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        for name in ("w", "x", "y", "z"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v!r} outside [0, 1]")

    def __iter__(self):
        return iter((self.w, self.x, self.y, self.z))


@dataclass(frozen=True)
class Poisson:
    """Poisson photon-number distribution with mean mu."""

    mu: float

    def __post_init__(self) -> None:
        if not self.mu >= 0.0:
            raise ValueError(f"mu must be >= 0, got {self.mu!r}")


@dataclass(frozen=True)
class FixedN:
    """Exactly n photons."""

    n: int

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError(f"n must be >= 0, got {self.n!r}")


@dataclass(frozen=True)
class Custom:
    """Explicit photon-number weights |C_n|^2, n = 0..len(weights)-1."""

    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "weights", tuple(float(v) for v in self.weights))
        if not self.weights:
            raise ValueError("weights must be non-empty")
        if any(v < 0.0 for v in self.weights):
            raise ValueError("weights must be non-negative")
        total = math.fsum(self.weights)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"weights must sum to 1 within 1e-9, got {total!r}")


EnergyDistribution = Union[Poisson, FixedN, Custom]


class NormFactorCache:
    """Per-(zeta, n) combined normalization constants of the n-photon kernels.

    The constant is 1/S_n with S_n = sum_r Xi(r) Xi(n-r) / (r! (n-r)!);
    at zeta = 0 it reduces to 1/(n+1) and in the extreme-entanglement limit
    to n!/2^n.  One cache instance is attached per XiTable.
    """

    _by_table: "WeakKeyDictionary[XiTable, NormFactorCache]" = WeakKeyDictionary()

    def __init__(self, xi: XiTable) -> None:
        self._xi = xi
        self._rows: dict[object, np.ndarray] = {}

    @classmethod
    def for_table(cls, xi: XiTable) -> "NormFactorCache":
        cache = cls._by_table.get(xi)
        if cache is None:
            cache = cls(xi)
            cls._by_table[xi] = cache
        return cache

    def row(self, zeta: ZetaSpec) -> np.ndarray:
        n_cap = self._xi.n_cap
        regime = zeta.regime
        key: object
        if regime is Regime.CASE_I:
            key = Regime.CASE_I
        elif regime is Regime.CASE_II:
            key = Regime.CASE_II
        else:
            key = zeta.magnitude
        cached = self._rows.get(key)
        if cached is not None:
            return cached
        if regime is Regime.CASE_I:
            consts = 1.0 / np.arange(1, n_cap + 2, dtype=float)
        elif regime is Regime.CASE_II:
            consts = factorials(n_cap) * np.ldexp(1.0, -np.arange(n_cap + 1))
        else:
            rho = self._xi.ratio_row(zeta)
            s = np.convolve(rho, rho)[:n_cap + 1]
            consts = 1.0 / s
        consts.flags.writeable = False
        self._rows[key] = consts
        return consts


def norm_consts(zeta: ZetaSpec, xi: XiTable) -> np.ndarray:
    """Combined normalization constants for n = 0..xi.n_cap."""
    return NormFactorCache.for_table(xi).row(zeta)


def _check_n(n: int, xi: XiTable) -> None:
    if n > xi.n_cap:
        raise ConfigurationError(f"n={n} exceeds the table cap n_cap={xi.n_cap}")


def g_nkm(zeta: ZetaSpec, n: int, k: int, m: int, args: KernelArgs,
          xi: XiTable) -> float:
    """Kernel for n photons with eavesdropper counts (k, m).

    Returns 0 when k + m > n (the state component is empty there).
    """
    if n < 0 or k < 0 or m < 0:
        raise ValueError("n, k, m must be non-negative")
    if k + m > n:
        return 0.0
    _check_n(n, xi)
    w, x, y, z = args
    t = n - k - m
    fact = factorials(xi.n_cap)
    # Products are grouped so that swapping mode labels 1 <-> 2 (which maps
    # (k, m, w, x, y, z) -> (m, k, y, z, w, x)) permutes bit-identical terms.
    if zeta.regime is Regime.CASE_II:
        return (math.ldexp(1.0, -n) * fact[n] / (fact[k] * fact[m] * fact[t])
                * (x ** k * z ** m) * (w + y) ** t)
    if zeta.regime is Regime.CASE_I:
        total = math.fsum(
            (fact[j + k] * fact[n - k - j]) / (fact[j] * fact[t - j])
            * (w ** j * y ** (t - j))
            for j in range(t + 1))
        return (x ** k * z ** m) / ((n + 1) * (fact[k] * fact[m])) * total
    xi_row = xi.row(zeta)
    const = norm_consts(zeta, xi)[n]
    total = math.fsum(
        (xi_row[j + k] * xi_row[n - k - j]) / (fact[j] * fact[t - j])
        * (w ** j * y ** (t - j))
        for j in range(t + 1))
    return const * (x ** k * z ** m) / (fact[k] * fact[m]) * total


def g_n(zeta: ZetaSpec, n: int, args: KernelArgs, xi: XiTable) -> float:
    """Kernel for n photons, marginal over the eavesdropper counts.

    Equals the sum of ``g_nkm`` over k + m <= n; at zeta = 0 the closed form
    is the geometric mean sum ((y+z)^(n+1) - (w+x)^(n+1)) / ((n+1)(y+z-w-x)),
    evaluated as an explicit geometric sum so the y+z -> w+x limit is exact.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    _check_n(n, xi)
    w, x, y, z = args
    s1 = y + z
    s2 = w + x
    if zeta.regime is Regime.CASE_I:
        return math.fsum(s1 ** i * s2 ** (n - i) for i in range(n + 1)) / (n + 1)
    if zeta.regime is Regime.CASE_II:
        return ((s1 + s2) / 2.0) ** n
    rho = xi.ratio_row(zeta)
    const = norm_consts(zeta, xi)[n]
    total = math.fsum((rho[r] * rho[n - r]) * (s2 ** r * s1 ** (n - r))
                      for r in range(n + 1))
    return const * total


def poisson_weights(mu: float, n_top: int) -> np.ndarray:
    """exp(-mu) mu^n / n! for n = 0..n_top."""
    out = np.empty(n_top + 1)
    out[0] = math.exp(-mu)
    for n in range(1, n_top + 1):
        out[n] = out[n - 1] * mu / n
    return out


def poisson_cutoff(mu: float, n_cap: int) -> int:
    """Truncation index floor(3 mu + 16), capped at n_cap with a tail check."""
    n_top = int(math.floor(TRUNCATION_SLOPE * mu + TRUNCATION_OFFSET))
    if n_top <= n_cap:
        return n_top
    tail = 1.0 - math.fsum(poisson_weights(mu, n_cap))
    if tail > POISSON_TAIL_LIMIT:
        warnings.warn(
            f"Poisson tail beyond n_cap={n_cap} is {tail:.3e} at mu={mu}; "
            "results are truncated", RuntimeWarning, stacklevel=2)
    return n_cap


def g_mu(zeta: ZetaSpec, mu: float, args: KernelArgs, xi: XiTable) -> float:
    """Poisson-weighted kernel, marginal over the eavesdropper counts.

    mu = 0 gives exactly 1 (vacuum) in every regime.
    """
    if not mu >= 0.0:
        raise ValueError(f"mu must be >= 0, got {mu!r}")
    if mu < 1e-15:
        return 1.0
    w, x, y, z = args
    s1 = y + z
    s2 = w + x
    if zeta.regime is Regime.CASE_I:
        # exp(-mu) (exp(mu s1) - exp(mu s2)) / (mu (s1 - s2)), written with
        # expm1 so there is no cancellation and the s1 == s2 branch is the
        # exact limit; (lo, hi) ordering keeps the value symmetric in s1, s2.
        lo, hi = (s1, s2) if s1 <= s2 else (s2, s1)
        u = mu * (hi - lo)
        phi = 1.0 if u == 0.0 else math.expm1(u) / u
        return math.exp(mu * (lo - 1.0)) * phi
    if zeta.regime is Regime.CASE_II:
        return math.exp(-0.5 * mu * (2.0 - (s1 + s2)))
    n_top = poisson_cutoff(mu, xi.n_cap)
    weights = poisson_weights(mu, n_top)
    return math.fsum(weights[n] * g_n(zeta, n, args, xi) for n in range(n_top + 1))


def g_mu_km(zeta: ZetaSpec, mu: float, k: int, m: int, args: KernelArgs,
            xi: XiTable) -> float:
    """Poisson-weighted kernel resolved on the eavesdropper counts (k, m)."""
    if not mu >= 0.0:
        raise ValueError(f"mu must be >= 0, got {mu!r}")
    if k < 0 or m < 0:
        raise ValueError("k, m must be non-negative")
    w, x, y, z = args
    fact = factorials(xi.n_cap)
    if zeta.regime is Regime.CASE_II:
        half = 0.5 * mu
        return (math.exp(-half * (2.0 - (w + y))) * half ** (k + m)
                * (x ** k * z ** m) / (fact[k] * fact[m]))
    n_top = poisson_cutoff(mu, xi.n_cap)
    if k + m > n_top:
        return 0.0
    weights = poisson_weights(mu, n_top)
    return math.fsum(weights[n] * g_nkm(zeta, n, k, m, args, xi)
                     for n in range(k + m, n_top + 1))


def _weights_of(dist: Custom, xi: XiTable) -> np.ndarray:
    if len(dist.weights) > xi.n_cap + 1:
        raise ConfigurationError(
            f"{len(dist.weights)} weights exceed the table cap n_cap={xi.n_cap}")
    return np.asarray(dist.weights)


def g_custom(dist: Custom, zeta: ZetaSpec, args: KernelArgs, xi: XiTable) -> float:
    """Kernel for an arbitrary photon-number distribution, (k, m)-marginal."""
    weights = _weights_of(dist, xi)
    return math.fsum(weights[n] * g_n(zeta, n, args, xi)
                     for n in range(len(weights)) if weights[n])


def g_custom_km(dist: Custom, zeta: ZetaSpec, k: int, m: int, args: KernelArgs,
                xi: XiTable) -> float:
    """Kernel for an arbitrary photon-number distribution at counts (k, m)."""
    weights = _weights_of(dist, xi)
    return math.fsum(weights[n] * g_nkm(zeta, n, k, m, args, xi)
                     for n in range(k + m, len(weights)) if weights[n])


def g_km_table(zeta: ZetaSpec, weights: np.ndarray, args: KernelArgs,
               xi: XiTable, kmax: int) -> np.ndarray:
    """Energy-weighted kernel for every (k, m) with k + m <= kmax at once.

    ``weights[n]`` is the photon-number weight |C_n|^2 for n = 0..n_top.
    Entry [k, m] equals sum_n weights[n] * g_nkm(n, k, m); entries with
    k + m > kmax are 0.  This is the bulk evaluation used by the entropy
    average, algebraically identical to summing ``g_nkm`` per point.
    """
    n_top = len(weights) - 1
    if n_top > xi.n_cap:
        raise ConfigurationError(
            f"{n_top + 1} weights exceed the table cap n_cap={xi.n_cap}")
    w, x, y, z = args
    inv_fact = inverse_factorials(xi.n_cap)[:n_top + 1]
    xi_row = xi.row(zeta)[:n_top + 1]
    consts = norm_consts(zeta, xi)[:n_top + 1]

    scaled = np.asarray(weights) * consts
    idx = np.arange(n_top + 1)
    order = idx[:, None] + idx[None, :]
    pair = np.outer(xi_row, xi_row)
    pair *= np.where(order <= n_top, scaled[np.minimum(order, n_top)], 0.0)

    wpow = w ** idx * inv_fact
    ypow = y ** idx * inv_fact
    xpow = x ** idx * inv_fact
    zpow = z ** idx * inv_fact

    out = np.zeros((kmax + 1, kmax + 1))
    for k in range(min(kmax, n_top) + 1):
        left = wpow[:n_top - k + 1]
        for m in range(min(kmax - k, n_top - k) + 1):
            core = left @ pair[k:, m:] @ ypow[:n_top - m + 1]
            out[k, m] = xpow[k] * zpow[m] * core
    return out
