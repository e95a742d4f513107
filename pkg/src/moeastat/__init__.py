"""Statistical comparison of multi-objective optimizers over several quality indicators."""

from .data import (
    ApproximationSet,
    IndicatorDataset,
    IndicatorRecord,
    PerformanceCloud,
    ReferenceData,
    Scenario,
    normalize_scenario,
    parse_approximation_csv,
    parse_indicator_csv,
)
from .dsc import (
    GroupPartition,
    PValueMatrix,
    RankTable,
    dsc_rank,
    ensemble_average,
    ensemble_hierarchical,
    mean_ranks,
    pvalue_matrix,
    threshold_and_partition,
)
from .indicators import IndicatorSpec, compute_indicators, delta_p, gd_p, hypervolume_exact, hypervolume_mc, igd_p
from .lda import LdaResult, between_scatter, ld_values, lda_weights, rank_groups, total_covariance
from .stattests import TestResult, ad2_statistic, ad2_test, energy_statistic, energy_test

__version__ = "0.1.0"

__all__ = [
    "ApproximationSet",
    "IndicatorDataset",
    "IndicatorRecord",
    "PerformanceCloud",
    "ReferenceData",
    "Scenario",
    "normalize_scenario",
    "parse_approximation_csv",
    "parse_indicator_csv",
    "GroupPartition",
    "PValueMatrix",
    "RankTable",
    "dsc_rank",
    "ensemble_average",
    "ensemble_hierarchical",
    "mean_ranks",
    "pvalue_matrix",
    "threshold_and_partition",
    "IndicatorSpec",
    "compute_indicators",
    "delta_p",
    "gd_p",
    "hypervolume_exact",
    "hypervolume_mc",
    "igd_p",
    "LdaResult",
    "between_scatter",
    "ld_values",
    "lda_weights",
    "rank_groups",
    "total_covariance",
    "TestResult",
    "ad2_statistic",
    "ad2_test",
    "energy_statistic",
    "energy_test",
]
