"""Figure rendering for sweep CSVs produced by the entqkd CLI."""

from .reader import METRICS, SchemaError, SweepData, read_sweep_csv
from .render import PlotRequest, render

__version__ = "0.1.0"
