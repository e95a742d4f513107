"""Pipeline orchestration, tables and figures."""

from .pipeline import AnalysisConfig, run_pipeline, write_figures, write_report
from .svg import render_heatmap, render_ld_histogram, render_scatter
from .tables import format_partition, render_grouping_table

__all__ = [
    "AnalysisConfig",
    "format_partition",
    "render_grouping_table",
    "render_heatmap",
    "render_ld_histogram",
    "render_scatter",
    "run_pipeline",
    "write_figures",
    "write_report",
]
