"""End-to-end analysis of an indicator dataset.

For every (problem, k) scenario: normalize, run pairwise E-tests, partition,
fit the constrained LDA and rank groups by mean LD value; in parallel, rank
each indicator separately with univariate DSC and combine those rankings with
the average and hierarchical ensembles. Results are written as
``report.json``, ``groupings.md`` and SVG figures.
"""

from __future__ import annotations

import hashlib
import json
import logging
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

from ..data import IndicatorDataset, PerformanceCloud, Scenario, normalize_scenario_checked, orientation_of
from ..dsc import (
    DEFAULT_ALPHA,
    GroupPartition,
    RankTable,
    dsc_rank,
    ensemble_average,
    ensemble_hierarchical,
    mean_ranks,
    pvalue_matrix,
    ranks_from_ordering,
    threshold_and_partition,
    threshold_matrix,
)
from ..errors import MoeaStatError
from ..lda import analyze
from ..seeding import derive_seed
from ..stattests import DEFAULT_PERMUTATIONS
from .svg import render_heatmap, render_ld_histogram, render_scatter
from .tables import render_grouping_table

log = logging.getLogger(__name__)

ETEST_SCHEME = "etest_lda"
AVERAGE_SCHEME = "dsc_average"
HIERARCHICAL_SCHEME = "dsc_hierarchical"


@dataclass
class AnalysisConfig:
    alpha: float = DEFAULT_ALPHA
    permutations: int = DEFAULT_PERMUTATIONS
    seed: int = 0
    indicators: Optional[Tuple[str, ...]] = None
    orientation: Dict[str, str] = field(default_factory=dict)
    algorithms: Optional[Tuple[str, ...]] = None

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "AnalysisConfig":
        """Pick the analysis keys out of a config mapping; other keys are ignored."""
        cfg = cls()
        if "alpha" in data:
            cfg.alpha = float(data["alpha"])
        if "permutations" in data:
            cfg.permutations = int(data["permutations"])
        if "seed" in data:
            cfg.seed = int(data["seed"])
        if data.get("indicators") is not None:
            inds = data["indicators"]
            cfg.indicators = tuple(inds.split(",") if isinstance(inds, str) else inds)
        if data.get("orientation"):
            cfg.orientation = dict(data["orientation"])
        if data.get("algorithms") is not None:
            cfg.algorithms = tuple(data["algorithms"])
        return cfg

    def resolved(self, dataset: IndicatorDataset) -> "AnalysisConfig":
        indicators = self.indicators or tuple(dataset.indicators())
        orientation = {ind: orientation_of(ind, self.orientation) for ind in indicators}
        algorithms = self.algorithms or tuple(dataset.algorithms())
        return AnalysisConfig(self.alpha, self.permutations, self.seed, tuple(indicators), orientation,
                              tuple(algorithms))

    def echo(self) -> dict:
        return {
            "alpha": self.alpha,
            "permutations": self.permutations,
            "seed": self.seed,
            "indicators": list(self.indicators or ()),
            "orientation": dict(self.orientation),
            "algorithms": list(self.algorithms or ()),
        }


@dataclass
class ScenarioResult:
    scenario: Scenario
    clouds: List[PerformanceCloud]
    degenerate: List[str]
    pvalues: Any
    threshold: Any
    partition: GroupPartition
    lda: Any
    ranks: Dict[str, RankTable]

    def to_dict(self) -> dict:
        s = self.scenario
        return {
            "problem": s.problem,
            "k": s.k,
            "label": s.label,
            "indicators": list(s.indicators),
            "algorithms": list(s.algorithms),
            "degenerate_indicators": list(self.degenerate),
            "clouds": {c.algorithm: {"runs": list(c.runs), "points": c.points.tolist()} for c in self.clouds},
            "pvalues": self.pvalues.to_dict(),
            "threshold": self.threshold.to_dict(),
            "partition": self.partition.to_dict(),
            "lda": self.lda.to_dict(),
            "ranks": {name: t.to_dict() for name, t in self.ranks.items()},
        }


@dataclass
class AnalysisReport:
    config: AnalysisConfig
    scenarios: List[ScenarioResult]
    errors: List[dict]
    mean_ranks: Dict[str, Dict[int, Dict[str, float]]]

    def to_dict(self) -> dict:
        return {
            "config": self.config.echo(),
            "scenarios": [s.to_dict() for s in self.scenarios],
            "mean_ranks": {scheme: {str(k): v for k, v in by_k.items()} for scheme, by_k in self.mean_ranks.items()},
            "errors": list(self.errors),
        }

    def to_json(self) -> str:
        return dumps(self.to_dict())


def dumps(obj) -> str:
    # repr-based float output is the shortest exact round-trip (at most 17 digits)
    return json.dumps(obj, indent=1, ensure_ascii=False, allow_nan=False) + "\n"


def scenario_seed(seed: int, problem: str, k: int) -> int:
    digest = hashlib.blake2b(f"{problem}\x1f{k}".encode(), digest_size=8).digest()
    return derive_seed(seed, int.from_bytes(digest, "little"))


def analyze_scenario(dataset: IndicatorDataset, scenario: Scenario, config: AnalysisConfig) -> ScenarioResult:
    """Full multivariate and univariate analysis of one scenario."""
    clouds, degenerate = normalize_scenario_checked(dataset, scenario, config.orientation)
    base = scenario_seed(config.seed, scenario.problem, scenario.k)
    N = pvalue_matrix(clouds, "energy", config.permutations, derive_seed(base, 0))
    partition = threshold_and_partition(N, config.alpha)
    fit = analyze(clouds, partition, seed=derive_seed(base, 1))
    ordered = [partition.groups[i] for i in fit.ranking]
    ranks = {ETEST_SCHEME: ranks_from_ordering(ordered, scenario.algorithms, scenario.key)}
    univariate = []
    for j, ind in enumerate(scenario.indicators):
        column = [PerformanceCloud(c.algorithm, c.points[:, [j]], c.runs) for c in clouds]
        table = dsc_rank(column, config.alpha, config.permutations, derive_seed(base, 2 + j), scenario.key)
        ranks[f"dsc_{ind}"] = table
        univariate.append(table)
    ranks[AVERAGE_SCHEME] = ensemble_average(univariate)
    ranks[HIERARCHICAL_SCHEME] = ensemble_hierarchical(univariate)
    return ScenarioResult(scenario, clouds, degenerate, N, threshold_matrix(N, config.alpha), partition, fit, ranks)


def run_pipeline(dataset: IndicatorDataset, config: Optional[AnalysisConfig] = None,
                 workers: Optional[int] = None) -> AnalysisReport:
    """Analyze every scenario of ``dataset``.

    A failing scenario is recorded under ``errors`` and skipped. ``workers``
    only changes scheduling; the report is identical for any value.
    """
    config = (config or AnalysisConfig()).resolved(dataset)
    keys = dataset.scenario_keys()

    def run(key):
        problem, k = key
        label = f"{problem}_{k}D"
        try:
            scenario = dataset.scenario(problem, k, config.indicators, config.algorithms)
            return analyze_scenario(dataset, scenario, config)
        except MoeaStatError as exc:
            log.warning("scenario %s failed: %s", label, exc)
            return {"scenario": label, "problem": problem, "k": k, "error": f"{type(exc).__name__}: {exc}"}

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run, keys))
    else:
        outcomes = [run(key) for key in keys]
    results = [o for o in outcomes if isinstance(o, ScenarioResult)]
    errors = [o for o in outcomes if not isinstance(o, ScenarioResult)]
    return AnalysisReport(config, results, errors, _summarize(results, errors))


def _summarize(results: Sequence[ScenarioResult], errors: List[dict]) -> Dict[str, Dict[int, Dict[str, float]]]:
    schemes = list(dict.fromkeys(name for r in results for name in r.ranks))
    out: Dict[str, Dict[int, Dict[str, float]]] = {}
    for scheme in schemes:
        by_k: Dict[int, List[RankTable]] = {}
        for r in results:
            if scheme in r.ranks:
                by_k.setdefault(r.scenario.k, []).append(r.ranks[scheme])
        out[scheme] = {}
        for k in sorted(by_k):
            try:
                out[scheme][k] = mean_ranks(by_k[k])
            except MoeaStatError as exc:
                errors.append({"scenario": f"mean ranks {scheme} {k}D", "k": k, "error": f"{type(exc).__name__}: {exc}"})
    return out


def _safe(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", name)


def _partition_from_dict(d: Mapping[str, Any]) -> GroupPartition:
    return GroupPartition(tuple(tuple(g) for g in d["groups"]), bool(d["transitive"]),
                          tuple(tuple(v) for v in d["violations"]))


def grouping_markdown(report: Mapping[str, Any]) -> str:
    rows = [(s["problem"], s["k"], _partition_from_dict(s["partition"])) for s in report["scenarios"]]
    return render_grouping_table(rows)


def figures(report: Mapping[str, Any]) -> Dict[str, str]:
    """Relative path -> SVG text for every figure derivable from a report dict."""
    out = {}
    for s in report["scenarios"]:
        label = _safe(f"{s['problem']}_{s['k']}D")
        title = f"{s['problem']} ({s['k']}D)"
        clouds = {a: c["points"] for a, c in s["clouds"].items()}
        weights = s["lda"]["weights"]
        if len(s["indicators"]) == 2:
            ind = s["indicators"]
            orient = report["config"]["orientation"]
            labels = tuple(name if orient.get(name) != "minimize" else f"1 - {name}" for name in ind)
            out[f"figures/{label}_scatter.svg"] = render_scatter(clouds, weights, labels, title)
        out[f"figures/{label}_ld.svg"] = render_ld_histogram(s["lda"]["ld_values"], title=title)
    for scheme, by_k in report["mean_ranks"].items():
        if not by_k:
            continue
        table = {int(k): v for k, v in by_k.items()}
        out[f"figures/meanrank_{_safe(scheme)}.svg"] = render_heatmap(table, title=f"mean rank: {scheme}")
    return out


def write_figures(report: Mapping[str, Any], out_dir) -> List[Path]:
    out_dir = Path(out_dir)
    written = []
    for rel, text in figures(report).items():
        path = out_dir / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        written.append(path)
    return written


def write_report(report: AnalysisReport, out_dir, with_figures: bool = True) -> List[Path]:
    """Write ``report.json``, ``groupings.md`` and (optionally) figures."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    text = report.to_json()
    data = json.loads(text)
    paths = [out_dir / "report.json", out_dir / "groupings.md"]
    paths[0].write_text(text, encoding="utf-8")
    paths[1].write_text(grouping_markdown(data), encoding="utf-8")
    if with_figures:
        paths.extend(write_figures(data, out_dir))
    return paths
