"""Command-line interface: ``moeastat {indicators,analyze,render}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Sequence, Tuple

from .data import ReferenceData, parse_approximation_csv, parse_front_csv, parse_indicator_csv, write_indicator_csv
from .errors import MoeaStatError, ParameterError
from .indicators import DEFAULT_HV_EXACT_MAX_K, DEFAULT_MC_SAMPLES, IndicatorSpec, compute_indicators
from .report.pipeline import AnalysisConfig, run_pipeline, write_figures, write_report

log = logging.getLogger("moeastat")


def load_config(path: Optional[str]) -> Tuple[Dict[str, Any], Path]:
    if not path:
        return {}, Path.cwd()
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ParameterError("config file must hold a JSON object")
    return data, Path(path).resolve().parent


def load_references(config: Mapping[str, Any], base: Path) -> Dict[Tuple[str, int], ReferenceData]:
    """Reference fronts and HV reference points from the ``references`` config list.

    Each entry: ``{"problem": "F1", "k": 3, "front": "fronts/F1_3.csv",
    "hv_reference_point": [1.1, 1.1, 1.1]}``; relative paths resolve against
    the config file's directory.
    """
    refs = {}
    for entry in config.get("references", []):
        k = int(entry["k"])
        front_path = Path(entry["front"])
        if not front_path.is_absolute():
            front_path = base / front_path
        refs[(str(entry["problem"]), k)] = ReferenceData(
            str(entry["problem"]), k, parse_front_csv(front_path, k), entry["hv_reference_point"])
    return refs


def _pick(args: argparse.Namespace, config: Mapping[str, Any], name: str, default):
    value = getattr(args, name, None)
    if value is not None:
        return value
    return config.get(name, default)


def _indicator_list(value) -> Optional[Sequence[str]]:
    if value is None:
        return None
    if isinstance(value, str):
        return [v.strip() for v in value.split(",") if v.strip()]
    return list(value)


def cmd_indicators(args: argparse.Namespace) -> int:
    config, base = load_config(args.config)
    refs = load_references(config, base)
    names = _indicator_list(_pick(args, config, "indicators", "HV,D2"))
    specs = [IndicatorSpec.from_name(n) for n in names]
    sets = parse_approximation_csv(args.approx)
    dataset = compute_indicators(
        sets, refs, specs,
        hv_exact_max_k=int(_pick(args, config, "hv_exact_max_k", DEFAULT_HV_EXACT_MAX_K)),
        mc_samples=int(_pick(args, config, "mc_samples", DEFAULT_MC_SAMPLES)),
        seed=int(_pick(args, config, "seed", 0)),
        workers=args.workers,
    )
    out = args.out or config.get("indicator_csv") or "indicators.csv"
    write_indicator_csv(dataset, out)
    log.info("wrote %d records to %s", len(dataset), out)
    return 0


def cmd_analyze(args: argparse.Namespace) -> int:
    config, _ = load_config(args.config)
    merged = dict(config)
    for key in ("alpha", "permutations", "seed", "indicators"):
        value = getattr(args, key)
        if value is not None:
            merged[key] = value
    analysis = AnalysisConfig.from_mapping(merged)
    dataset = parse_indicator_csv(args.indicator_csv)
    report = run_pipeline(dataset, analysis, workers=args.workers)
    out_dir = _pick(args, config, "out_dir", "moeastat-out")
    write_report(report, out_dir, with_figures=not args.no_figures)
    for err in report.errors:
        log.warning("%s: %s", err["scenario"], err["error"])
    log.info("analyzed %d scenarios (%d failed); output in %s", len(report.scenarios), len(report.errors), out_dir)
    return 1 if report.errors and not report.scenarios else 0


def cmd_render(args: argparse.Namespace) -> int:
    with open(args.report, encoding="utf-8") as fh:
        report = json.load(fh)
    out_dir = args.out_dir or str(Path(args.report).resolve().parent)
    paths = write_figures(report, out_dir)
    log.info("wrote %d figures under %s", len(paths), out_dir)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="moeastat", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("indicators", help="approximation sets + references -> indicator CSV")
    p.add_argument("approx", help="approximation CSV (algorithm,problem,k,run,f1,...,fK)")
    p.add_argument("--config", help="JSON config with a 'references' table")
    p.add_argument("--out", help="output indicator CSV")
    p.add_argument("--indicators", help="comma-separated names, e.g. HV,D2")
    p.add_argument("--hv-exact-max-k", dest="hv_exact_max_k", type=int)
    p.add_argument("--mc-samples", dest="mc_samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_indicators)

    p = sub.add_parser("analyze", help="indicator CSV -> report.json, groupings.md, figures")
    p.add_argument("indicator_csv")
    p.add_argument("--config")
    p.add_argument("--alpha", type=float)
    p.add_argument("--permutations", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--indicators")
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--workers", type=int, help="threads for scenario-level parallelism")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("render", help="report.json -> SVG figures")
    p.add_argument("report")
    p.add_argument("--out-dir", dest="out_dir")
    p.set_defaults(func=cmd_render)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (MoeaStatError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"moeastat: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
