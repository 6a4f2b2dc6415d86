"""Sweep engine: metrics over a mu grid for a family of zeta values.

A sweep evaluates the four figures of merit at every grid mu for zeta = 0,
each requested finite zeta, and the extreme-entanglement limit, then writes
one CSV row per (zeta, mu) point.  Rows are independent; recomputing any
single point reproduces the sweep's row bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigurationError
from .gfunctions import Poisson, TRUNCATION_OFFSET, TRUNCATION_SLOPE
from .kernel import XiTable, ZetaSpec, compute_xi, DEFAULT_INF_THRESHOLD
from .metrics import qkd_metrics
from .detection import DetectorParams, TapParams
from .partitions import PartitionTable, enumerate_partitions

CSV_HEADER = "mu,zeta,p_good,p_sift_err,av_ent,fig_merit"

# Guard against binary rounding in the grid count formulas (0.007/0.0001
# evaluates just below 70 in float64).
_GRID_EPS = 1e-9


@dataclass(frozen=True)
class ModelParams:
    """Everything that defines a link model apart from the pulse energy."""

    det: DetectorParams
    tap: TapParams
    zetas: tuple[float, ...] = (1.0, 10.0, 100.0, 1000.0)
    renyi_order: float = 1.1
    n_cap: int = 32
    inf_threshold: float = DEFAULT_INF_THRESHOLD
    basis_match_factor: bool = False
    kmax: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "zetas", tuple(float(z) for z in self.zetas))
        if self.n_cap < 1:
            raise ValueError(f"n_cap must be >= 1, got {self.n_cap}")
        if not self.renyi_order > 0 or self.renyi_order == 1.0:
            raise ValueError(f"Renyi order must be positive and != 1, got {self.renyi_order!r}")
        for z in self.zetas:
            if not 0.0 < abs(z) < math.inf:
                raise ValueError(f"finite zeta list entries must be nonzero, got {z!r}")

    def zeta_specs(self) -> tuple[ZetaSpec, ...]:
        """zeta = 0, the finite values, then the extreme-entanglement limit."""
        finite = tuple(ZetaSpec(z, self.inf_threshold) for z in self.zetas)
        return (ZetaSpec(0.0, self.inf_threshold),) + finite + \
            (ZetaSpec(math.inf, self.inf_threshold),)


@dataclass(frozen=True)
class MuGrid:
    """Fine steps up to mu_fine_max, then coarse steps past mu_max.

    The point counts follow n_fine = floor((mu_fine_max - mu_begin)/fine_incr)
    and n_coarse = 1 + floor((mu_max - mu_begin - n_fine*fine_incr)/coarse_incr),
    with n_coarse + 1 coarse points starting where the fine region ends.  Set
    mu_fine_max = mu_begin for a uniform grid with step coarse_incr.
    """

    fine_incr: float = 1e-4
    mu_fine_max: float = 0.007
    coarse_incr: float = 2e-3
    mu_max: float = 0.04
    mu_begin: float = 0.0

    def __post_init__(self) -> None:
        if not (0.0 <= self.mu_begin <= self.mu_fine_max <= self.mu_max):
            raise ValueError("need 0 <= mu_begin <= mu_fine_max <= mu_max")
        if not (self.fine_incr > 0.0 and self.coarse_incr > 0.0):
            raise ValueError("grid increments must be positive")

    @property
    def n_fine(self) -> int:
        return int(math.floor((self.mu_fine_max - self.mu_begin) / self.fine_incr
                              + _GRID_EPS))

    @property
    def n_coarse(self) -> int:
        fine_span = self.n_fine * self.fine_incr
        return 1 + int(math.floor((self.mu_max - self.mu_begin - fine_span)
                                  / self.coarse_incr + _GRID_EPS))

    def points(self) -> tuple[float, ...]:
        """Strictly increasing mu values: n_fine fine + (n_coarse + 1) coarse."""
        fine = [self.mu_begin + i * self.fine_incr for i in range(self.n_fine)]
        start = self.mu_begin + self.n_fine * self.fine_incr
        coarse = [start + i * self.coarse_incr for i in range(self.n_coarse + 1)]
        return tuple(fine + coarse)


@dataclass(frozen=True)
class SweepRow:
    mu: float
    zeta_label: str
    p_good: float
    p_sift_err: float
    av_ent: float
    fig_merit: float


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...] = field(default_factory=tuple)


def required_n_cap(mu_max: float) -> int:
    """Smallest table cap that supports Poisson truncation at mu_max."""
    return int(math.floor(TRUNCATION_SLOPE * mu_max + TRUNCATION_OFFSET))


def evaluate_point(params: ModelParams, xi: XiTable, mu: float,
                   zeta: ZetaSpec) -> SweepRow:
    """One sweep row; NaN encodes metrics that are undefined at this point."""
    metrics = qkd_metrics(Poisson(mu), zeta, params.det, params.tap, xi,
                          params.renyi_order, kmax=params.kmax,
                          basis_match_factor=params.basis_match_factor)
    nan = float("nan")
    return SweepRow(
        mu=mu,
        zeta_label=zeta.label,
        p_good=metrics.p_good,
        p_sift_err=nan if metrics.p_sift_err is None else metrics.p_sift_err,
        av_ent=nan if metrics.av_ent is None else metrics.av_ent,
        fig_merit=nan if metrics.fig_merit is None else metrics.fig_merit,
    )


def run_sweep(params: ModelParams, grid: MuGrid,
              parts: PartitionTable | None = None) -> SweepResult:
    """Evaluate the grid for every zeta curve (zeta-major row order).

    Raises ConfigurationError when n_cap cannot support the grid's mu_max.
    """
    needed = required_n_cap(grid.mu_max)
    if params.n_cap < needed:
        raise ConfigurationError(
            f"n_cap={params.n_cap} insufficient for mu_max={grid.mu_max}; "
            f"need n_cap >= {needed}")
    if parts is None:
        parts = enumerate_partitions(params.n_cap)
    specs = params.zeta_specs()
    xi = compute_xi(specs, params.n_cap, parts)
    mus = grid.points()
    rows = [evaluate_point(params, xi, mu, spec) for spec in specs for mu in mus]
    return SweepResult(rows=tuple(rows))


def _format(value: float) -> str:
    return repr(float(value))


def write_csv(result: SweepResult, path: str | Path) -> None:
    """Write UTF-8 CSV with round-trip float precision and a trailing newline."""
    lines = [CSV_HEADER]
    for r in result.rows:
        lines.append(",".join([
            _format(r.mu), r.zeta_label, _format(r.p_good),
            _format(r.p_sift_err), _format(r.av_ent), _format(r.fig_merit),
        ]))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_csv(path: str | Path) -> SweepResult:
    """Inverse of :func:`write_csv` (used for round-trip checks)."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise ConfigurationError(f"unexpected CSV header in {path}")
    rows = []
    for line in lines[1:]:
        mu, label, p_good, p_sift_err, av_ent, fig_merit = line.split(",")
        rows.append(SweepRow(mu=float(mu), zeta_label=label,
                             p_good=float(p_good), p_sift_err=float(p_sift_err),
                             av_ent=float(av_ent), fig_merit=float(fig_merit)))
    return SweepResult(rows=tuple(rows))
