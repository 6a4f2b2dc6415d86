"""Sweep CSV parsing.

The sweep schema is ``mu,zeta,p_good,p_sift_err,av_ent,fig_merit``; rows are
grouped into one series per zeta label, in first-appearance order.  Extra
columns are tolerated and surfaced as an annotation string.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

METRICS = ("p_good", "p_sift_err", "av_ent", "fig_merit")
REQUIRED = ("mu", "zeta") + METRICS


class SchemaError(ValueError):
    """The CSV does not carry the sweep schema."""


@dataclass
class SweepData:
    """Per-zeta series: label -> list of (mu, {metric: value}) rows."""

    labels: list[str] = field(default_factory=list)
    series: dict = field(default_factory=dict)
    annotation: str = ""

    def metric_series(self, label: str, metric: str) -> tuple[list[float], list[float]]:
        rows = self.series[label]
        return [mu for mu, _ in rows], [vals[metric] for _, vals in rows]

    @property
    def mu_range(self) -> tuple[float, float]:
        mus = [mu for rows in self.series.values() for mu, _ in rows]
        return min(mus), max(mus)


def read_sweep_csv(path: str | Path) -> SweepData:
    """Parse a sweep CSV, raising SchemaError when columns are missing."""
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        header = reader.fieldnames or []
        missing = [name for name in REQUIRED if name not in header]
        if missing:
            raise SchemaError(f"missing columns {missing} in {path}")
        extras = [name for name in header if name not in REQUIRED]
        data = SweepData()
        for lineno, row in enumerate(reader, start=2):
            try:
                mu = float(row["mu"])
                values = {metric: float(row[metric]) for metric in METRICS}
            except (TypeError, ValueError) as exc:
                raise SchemaError(f"line {lineno}: {exc}") from exc
            label = row["zeta"]
            if label not in data.series:
                data.labels.append(label)
                data.series[label] = []
            data.series[label].append((mu, values))
            if extras and not data.annotation:
                data.annotation = ", ".join(f"{name}={row[name]}" for name in extras)
    if not data.labels:
        raise SchemaError(f"no data rows in {path}")
    return data
