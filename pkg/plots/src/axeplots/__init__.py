"""Batch figure renderer for axedp report CSVs.

Renders only from files (metrics.csv, histograms.csv, paths.csv); metrics are
never recomputed here. SVG output by default, PNG via the file extension.
"""

from .figures import FigureResult, plot_lp_histogram, plot_metric_vs_epsilon, plot_scenario_fan
from .reading import FigureInputError, read_histograms, read_metrics, read_paths

__version__ = "0.1.0"

__all__ = [
    "FigureInputError",
    "FigureResult",
    "plot_lp_histogram",
    "plot_metric_vs_epsilon",
    "plot_scenario_fan",
    "read_histograms",
    "read_metrics",
    "read_paths",
]
