"""Figure rendering: one curve per zeta label for a chosen metric.

The zeta = 0 curve is drawn solid and the infinite-entanglement curve
dash-dot, so the two envelopes stand out against the dashed finite-zeta
curves.  Rendering writes both PNG and SVG next to the requested output
path and returns the plotted series, which are a pure function of the CSV
contents.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .reader import METRICS, SchemaError, read_sweep_csv


@dataclass(frozen=True)
class PlotRequest:
    csv_path: str
    metric: str
    out_path: str
    mu_min: float | None = None
    mu_max: float | None = None

    def __post_init__(self) -> None:
        if self.metric not in METRICS:
            raise SchemaError(f"metric {self.metric!r} not one of {METRICS}")
        if (self.mu_min is not None and self.mu_max is not None
                and self.mu_min > self.mu_max):
            raise SchemaError("mu_min must not exceed mu_max")


def _line_style(label: str) -> str:
    if label == "0":
        return "-"
    if label == "inf":
        return "-."
    return "--"


def render(req: PlotRequest) -> dict[str, tuple[list[float], list[float]]]:
    """Render the requested metric; returns {zeta label: (mus, values)}.

    The returned series are exactly the plotted data (after any crop).
    Writes ``<out>.png`` and ``<out>.svg``.
    """
    data = read_sweep_csv(req.csv_path)
    lo, hi = data.mu_range
    for bound, name in ((req.mu_min, "mu_min"), (req.mu_max, "mu_max")):
        if bound is not None and not lo <= bound <= hi:
            raise SchemaError(f"{name}={bound} outside the data range [{lo}, {hi}]")

    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    plotted: dict[str, tuple[list[float], list[float]]] = {}
    for label in data.labels:
        mus, values = data.metric_series(label, req.metric)
        if req.mu_min is not None:
            pairs = [(a, b) for a, b in zip(mus, values) if a >= req.mu_min]
            mus, values = [a for a, _ in pairs], [b for _, b in pairs]
        if req.mu_max is not None:
            pairs = [(a, b) for a, b in zip(mus, values) if a <= req.mu_max]
            mus, values = [a for a, _ in pairs], [b for _, b in pairs]
        marker = "o" if len(mus) == 1 else None
        ax.plot(mus, values, _line_style(label), marker=marker,
                label=f"zeta = {label}")
        plotted[label] = (mus, values)

    ax.set_xlabel("mu")
    ax.set_ylabel(req.metric)
    ax.legend()
    if req.mu_min is not None or req.mu_max is not None:
        ax.set_xlim(left=req.mu_min, right=req.mu_max)
    if data.annotation:
        ax.set_title(data.annotation, fontsize=9)

    base = Path(req.out_path)
    if base.suffix in (".png", ".svg"):
        base = base.with_suffix("")
    fig.savefig(base.with_suffix(".png"))
    fig.savefig(base.with_suffix(".svg"))
    plt.close(fig)
    return plotted
