"""Core data types, CSV parsing and per-scenario normalization."""

from __future__ import annotations

import csv
import math
import re
import warnings
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    CompletenessError,
    DegenerateScaleWarning,
    DimensionError,
    DuplicateKeyError,
    FormatError,
    InvalidValueError,
    ParameterError,
)

INDICATOR_HEADER = ("algorithm", "problem", "k", "run", "indicator", "value")
APPROX_PREFIX = ("algorithm", "problem", "k", "run")

MAXIMIZE = "maximize"
MINIMIZE = "minimize"

# built-in orientations; anything else must be declared by the caller
DEFAULT_ORIENTATION = {
    "HV": MAXIMIZE,
    "D2": MINIMIZE,
    "GD": MINIMIZE,
    "IGD": MINIMIZE,
}

ScenarioKey = Tuple[str, int]
RecordKey = Tuple[str, str, int, int, str]


@dataclass(frozen=True)
class ApproximationSet:
    algorithm: str
    problem: str
    k: int
    run: int
    points: np.ndarray = field(repr=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or len(pts) == 0:
            raise ParameterError("approximation set must be a non-empty list of vectors")
        if pts.shape[1] != self.k:
            raise DimensionError(f"points have {pts.shape[1]} components, expected k={self.k}")
        if not np.all(np.isfinite(pts)):
            raise ParameterError("approximation set contains non-finite values")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def scenario(self) -> ScenarioKey:
        return (self.problem, self.k)


@dataclass(frozen=True)
class ReferenceData:
    problem: str
    k: int
    reference_front: np.ndarray = field(repr=False)
    hv_reference_point: np.ndarray = field(repr=False)

    def __post_init__(self):
        front = np.asarray(self.reference_front, dtype=float)
        ref = np.asarray(self.hv_reference_point, dtype=float)
        if front.ndim != 2 or len(front) == 0 or front.shape[1] != self.k:
            raise DimensionError(f"reference front for {self.problem}/{self.k} must be non-empty with k columns")
        if ref.shape != (self.k,):
            raise DimensionError(f"HV reference point for {self.problem}/{self.k} must have {self.k} components")
        if not (np.all(np.isfinite(front)) and np.all(np.isfinite(ref))):
            raise ParameterError("reference data must be finite")
        object.__setattr__(self, "reference_front", front)
        object.__setattr__(self, "hv_reference_point", ref)


@dataclass(frozen=True)
class IndicatorRecord:
    algorithm: str
    problem: str
    k: int
    run: int
    indicator: str
    value: float

    @property
    def key(self) -> RecordKey:
        return (self.algorithm, self.problem, self.k, self.run, self.indicator)


class IndicatorDataset:
    """Long-form table of indicator values with unique keys."""

    def __init__(self, records: Iterable[IndicatorRecord] = ()):
        self._records: Dict[RecordKey, IndicatorRecord] = OrderedDict()
        for rec in records:
            self.add(rec)

    def add(self, rec: IndicatorRecord) -> None:
        if not math.isfinite(rec.value):
            raise InvalidValueError(f"non-finite value for {rec.key}")
        if rec.key in self._records:
            raise DuplicateKeyError(f"duplicate record {rec.key}")
        self._records[rec.key] = rec

    @property
    def records(self) -> List[IndicatorRecord]:
        return list(self._records.values())

    def __len__(self):
        return len(self._records)

    def __iter__(self):
        return iter(self._records.values())

    def get(self, key: RecordKey) -> Optional[float]:
        rec = self._records.get(key)
        return None if rec is None else rec.value

    def scenario_keys(self) -> List[ScenarioKey]:
        """Distinct (problem, k) pairs sorted by k, then natural problem order."""
        keys = {(r.problem, r.k) for r in self}
        return sorted(keys, key=lambda pk: (pk[1], natural_key(pk[0])))

    def algorithms(self) -> List[str]:
        """Algorithms in order of first appearance."""
        return list(OrderedDict.fromkeys(r.algorithm for r in self))

    def indicators(self) -> List[str]:
        return list(OrderedDict.fromkeys(r.indicator for r in self))

    def scenario(self, problem: str, k: int, indicators: Optional[Sequence[str]] = None,
                 algorithms: Optional[Sequence[str]] = None) -> "Scenario":
        rows = [r for r in self if r.problem == problem and r.k == k]
        if algorithms is None:
            algorithms = list(OrderedDict.fromkeys(r.algorithm for r in rows))
        else:
            present = {r.algorithm for r in rows}
            algorithms = [a for a in algorithms if a in present]
        if indicators is None:
            indicators = list(OrderedDict.fromkeys(r.indicator for r in rows))
        return Scenario(problem, k, tuple(indicators), tuple(algorithms))


@dataclass(frozen=True)
class Scenario:
    problem: str
    k: int
    indicators: Tuple[str, ...]
    algorithms: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "indicators", tuple(self.indicators))
        object.__setattr__(self, "algorithms", tuple(self.algorithms))
        if len(self.indicators) < 1:
            raise ParameterError("a scenario needs at least one indicator")
        if len(self.algorithms) < 2:
            raise ParameterError(f"scenario {self.label} needs at least two algorithms")
        if len(set(self.indicators)) != len(self.indicators) or len(set(self.algorithms)) != len(self.algorithms):
            raise ParameterError("scenario lists must not contain duplicates")

    @property
    def key(self) -> ScenarioKey:
        return (self.problem, self.k)

    @property
    def label(self) -> str:
        return f"{self.problem}_{self.k}D"


@dataclass(frozen=True)
class PerformanceCloud:
    """One algorithm's runs as points in the normalized indicator space."""

    algorithm: str
    points: np.ndarray = field(repr=False)
    runs: Tuple[int, ...] = ()

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "runs", tuple(self.runs) or tuple(range(len(pts))))

    @property
    def dim(self) -> int:
        return self.points.shape[1]


def natural_key(text: str):
    """Sort key treating digit runs as integers, so F2 < F10."""
    return [int(tok) if tok.isdigit() else tok for tok in re.split(r"(\d+)", text)]


def _parse_int(text: str, what: str, line: int, minimum: int) -> int:
    try:
        value = int(text)
    except ValueError:
        raise FormatError(f"{what} {text!r} is not an integer", line) from None
    if value < minimum:
        raise FormatError(f"{what} must be >= {minimum}, got {value}", line)
    return value


def _parse_float(text: str, line: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise InvalidValueError(f"cannot parse value {text!r}", line) from None
    if not math.isfinite(value):
        raise InvalidValueError(f"non-finite value {text!r}", line)
    return value


def parse_indicator_csv(path) -> IndicatorDataset:
    """Read ``algorithm,problem,k,run,indicator,value`` rows."""
    dataset = IndicatorDataset()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != INDICATOR_HEADER:
            raise FormatError(f"header must be {','.join(INDICATOR_HEADER)}", 1)
        for row in reader:
            line = reader.line_num
            if not row:
                continue
            if len(row) != len(INDICATOR_HEADER):
                raise FormatError(f"expected {len(INDICATOR_HEADER)} columns, got {len(row)}", line)
            alg, prob, k, run, ind, value = (c.strip() for c in row)
            rec = IndicatorRecord(alg, prob, _parse_int(k, "k", line, 1), _parse_int(run, "run", line, 0),
                                  ind, _parse_float(value, line))
            try:
                dataset.add(rec)
            except DuplicateKeyError as exc:
                raise DuplicateKeyError(f"line {line}: {exc}") from None
    return dataset


def format_float(value: float) -> str:
    return repr(float(value))


def write_indicator_csv(dataset: IndicatorDataset, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(INDICATOR_HEADER)
        for r in dataset:
            writer.writerow([r.algorithm, r.problem, r.k, r.run, r.indicator, format_float(r.value)])


def parse_approximation_csv(path) -> List[ApproximationSet]:
    """Read ``algorithm,problem,k,run,f1,...,fK`` rows into approximation sets.

    Rows with the same (algorithm, problem, k, run) form one set, in file order.
    """
    groups: Dict[Tuple[str, str, int, int], List[List[float]]] = OrderedDict()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise FormatError("empty file", 1)
        header = [h.strip() for h in header]
        nobj = len(header) - len(APPROX_PREFIX)
        expected = list(APPROX_PREFIX) + [f"f{i}" for i in range(1, nobj + 1)]
        if nobj < 1 or header != expected:
            raise FormatError("header must be algorithm,problem,k,run,f1,...,fK", 1)
        for row in reader:
            line = reader.line_num
            if not row:
                continue
            if len(row) != len(header):
                raise FormatError(f"expected {len(header)} columns, got {len(row)}", line)
            alg, prob, k, run = (c.strip() for c in row[:4])
            k = _parse_int(k, "k", line, 1)
            run = _parse_int(run, "run", line, 0)
            cells = [c.strip() for c in row[4:]]
            filled = [c for c in cells if c != ""]
            if k > nobj or any(c == "" for c in cells[:k]) or any(c != "" for c in cells[k:]):
                raise FormatError(f"k={k} but {len(filled)} objective cells populated", line)
            groups.setdefault((alg, prob, k, run), []).append([_parse_float(c, line) for c in cells[:k]])
    return [ApproximationSet(a, p, k, r, np.array(pts)) for (a, p, k, r), pts in groups.items()]


def parse_front_csv(path, k: Optional[int] = None) -> np.ndarray:
    """Read a reference front with header ``f1,...,fk``."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise FormatError("empty file", 1)
        header = [h.strip() for h in header]
        if header != [f"f{i}" for i in range(1, len(header) + 1)] or (k is not None and len(header) != k):
            raise FormatError(f"header must be f1,...,f{k or 'k'}", 1)
        rows = []
        for row in reader:
            if not row:
                continue
            if len(row) != len(header):
                raise FormatError(f"expected {len(header)} columns, got {len(row)}", reader.line_num)
            rows.append([_parse_float(c.strip(), reader.line_num) for c in row])
    if not rows:
        raise FormatError("reference front is empty")
    return np.array(rows)


def orientation_of(indicator: str, orientation: Optional[Mapping[str, str]] = None) -> str:
    table = dict(DEFAULT_ORIENTATION)
    if orientation:
        table.update(orientation)
    try:
        value = table[indicator]
    except KeyError:
        raise ParameterError(f"no orientation declared for indicator {indicator!r}") from None
    if value not in (MAXIMIZE, MINIMIZE):
        raise ParameterError(f"orientation must be {MAXIMIZE!r} or {MINIMIZE!r}, got {value!r}")
    return value


def scenario_matrix(dataset: IndicatorDataset, scenario: Scenario) -> Dict[str, Tuple[Tuple[int, ...], np.ndarray]]:
    """Raw indicator values per algorithm: ``{alg: (runs, array[runs, p])}``."""
    runs: Dict[str, set] = {a: set() for a in scenario.algorithms}
    for r in dataset:
        if (r.problem, r.k) == scenario.key and r.algorithm in runs and r.indicator in scenario.indicators:
            runs[r.algorithm].add(r.run)
    missing = []
    out = {}
    for alg in scenario.algorithms:
        alg_runs = tuple(sorted(runs[alg]))
        if not alg_runs:
            missing.append((alg, scenario.problem, scenario.k, "*", "*"))
            continue
        values = np.empty((len(alg_runs), len(scenario.indicators)))
        for i, run in enumerate(alg_runs):
            for j, ind in enumerate(scenario.indicators):
                v = dataset.get((alg, scenario.problem, scenario.k, run, ind))
                if v is None:
                    missing.append((alg, scenario.problem, scenario.k, run, ind))
                else:
                    values[i, j] = v
        out[alg] = (alg_runs, values)
    if missing:
        raise CompletenessError(missing)
    return out


def normalize_columns(values: np.ndarray, orientations: Sequence[str]) -> Tuple[np.ndarray, List[int]]:
    """Rescale each column to [0, 1], flipping minimized columns.

    Returns the rescaled array and the indices of constant columns, which are
    set to 0.5.
    """
    values = np.asarray(values, dtype=float)
    lo = values.min(axis=0)
    hi = values.max(axis=0)
    span = hi - lo
    out = np.empty_like(values)
    degenerate = []
    for j, orient in enumerate(orientations):
        if span[j] == 0:
            out[:, j] = 0.5
            degenerate.append(j)
            continue
        col = (values[:, j] - lo[j]) / span[j]
        if not np.all(np.isfinite(col)):
            raise InvalidValueError(f"normalization of column {j} overflowed")
        out[:, j] = 1.0 - col if orient == MINIMIZE else col
    return out, degenerate


def normalize_scenario(dataset: IndicatorDataset, scenario: Scenario,
                       orientation: Optional[Mapping[str, str]] = None) -> List[PerformanceCloud]:
    """Map a scenario's raw indicator values onto the unit hypercube.

    Bounds are pooled over all algorithms of the scenario. Minimized
    indicators are flipped (``1 - v``) so every component is to be maximized.
    A constant indicator maps to 0.5 and triggers a
    :class:`~moeastat.errors.DegenerateScaleWarning`.
    """
    clouds, degenerate = normalize_scenario_checked(dataset, scenario, orientation)
    for name in degenerate:
        warnings.warn(f"indicator {name!r} is constant in scenario {scenario.label}; mapped to 0.5",
                      DegenerateScaleWarning, stacklevel=2)
    return clouds


def normalize_scenario_checked(dataset: IndicatorDataset, scenario: Scenario,
                               orientation: Optional[Mapping[str, str]] = None
                               ) -> Tuple[List[PerformanceCloud], List[str]]:
    """Like :func:`normalize_scenario` but returns degenerate indicator names instead of warning."""
    orients = [orientation_of(ind, orientation) for ind in scenario.indicators]
    raw = scenario_matrix(dataset, scenario)
    stacked = np.vstack([raw[a][1] for a in scenario.algorithms])
    scaled, degenerate = normalize_columns(stacked, orients)
    clouds = []
    start = 0
    for alg in scenario.algorithms:
        runs, values = raw[alg]
        clouds.append(PerformanceCloud(alg, scaled[start:start + len(runs)], runs))
        start += len(runs)
    return clouds, [scenario.indicators[j] for j in degenerate]
