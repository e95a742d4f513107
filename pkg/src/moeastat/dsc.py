"""Deep Statistical Comparison: pairwise testing, grouping and ranking.

The pairwise p-values of ``m`` algorithms form a symmetric matrix with unit
diagonal. Thresholding it at the Bonferroni level ``alpha / C(m, 2)`` gives
the "statistically indistinguishable" relation; its connected components are
the algorithm groups. Groups are turned into fractional ranks.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .data import PerformanceCloud
from .errors import ConsistencyError, MoeaStatError, ParameterError
from .seeding import derive_seed
from .stattests import DEFAULT_PERMUTATIONS, TestResult, ad2_test, energy_test

DEFAULT_ALPHA = 0.05

TwoSampleTest = Callable[..., TestResult]
TESTS: Dict[str, TwoSampleTest] = {"energy": energy_test, "ad2": ad2_test}


@dataclass(frozen=True)
class PValueMatrix:
    algorithms: Tuple[str, ...]
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        algs = tuple(self.algorithms)
        E = np.array(self.entries, dtype=float)
        m = len(algs)
        if E.shape != (m, m):
            raise ParameterError(f"p-value matrix must be {m}x{m}")
        if not np.all(np.diag(E) == 1.0):
            raise ParameterError("p-value matrix diagonal must be 1")
        if not np.array_equal(E, E.T):
            raise ParameterError("p-value matrix must be symmetric")
        if not np.all((E > 0) & (E <= 1)):
            raise ParameterError("p-values must lie in (0, 1]")
        E.setflags(write=False)
        object.__setattr__(self, "algorithms", algs)
        object.__setattr__(self, "entries", E)

    def __getitem__(self, pair: Tuple[str, str]) -> float:
        a, b = pair
        return float(self.entries[self.algorithms.index(a), self.algorithms.index(b)])

    def to_dict(self) -> dict:
        return {"algorithms": list(self.algorithms), "entries": self.entries.tolist()}

    @classmethod
    def from_pairs(cls, algorithms: Sequence[str], pvalues: Mapping[Tuple[str, str], float]) -> "PValueMatrix":
        """Build from ``{(a, b): p}``; unlisted pairs get 1.0."""
        algs = list(algorithms)
        E = np.eye(len(algs))
        for i, j in itertools.combinations(range(len(algs)), 2):
            p = pvalues.get((algs[i], algs[j]), pvalues.get((algs[j], algs[i]), 1.0))
            E[i, j] = E[j, i] = p
        return cls(tuple(algs), E)


@dataclass(frozen=True)
class ThresholdMatrix:
    algorithms: Tuple[str, ...]
    entries: np.ndarray = field(repr=False)
    alpha: float
    threshold: float

    def to_dict(self) -> dict:
        return {"algorithms": list(self.algorithms), "entries": self.entries.astype(int).tolist(),
                "alpha": self.alpha, "threshold": self.threshold}


@dataclass(frozen=True)
class GroupPartition:
    groups: Tuple[Tuple[str, ...], ...]
    transitive: bool = True
    violations: Tuple[Tuple[str, str, str], ...] = ()

    def __post_init__(self):
        groups = tuple(tuple(g) for g in self.groups)
        members = [a for g in groups for a in g]
        if any(len(g) == 0 for g in groups) or len(members) != len(set(members)):
            raise ParameterError("groups must be non-empty and pairwise disjoint")
        object.__setattr__(self, "groups", groups)
        object.__setattr__(self, "violations", tuple(tuple(v) for v in self.violations))

    @property
    def algorithms(self) -> Tuple[str, ...]:
        return tuple(a for g in self.groups for a in g)

    def group_index(self, algorithm: str) -> int:
        for i, g in enumerate(self.groups):
            if algorithm in g:
                return i
        raise KeyError(algorithm)

    @property
    def all_singletons(self) -> bool:
        return all(len(g) == 1 for g in self.groups)

    def to_dict(self) -> dict:
        return {"groups": [list(g) for g in self.groups], "transitive": self.transitive,
                "violations": [list(v) for v in self.violations]}


@dataclass(frozen=True)
class RankTable:
    scenario: Optional[Tuple[str, int]]
    ranks: Mapping[str, float]

    def __post_init__(self):
        object.__setattr__(self, "ranks", dict(self.ranks))

    @property
    def algorithms(self) -> Tuple[str, ...]:
        return tuple(self.ranks)

    def to_dict(self) -> dict:
        return dict(self.ranks)


def bonferroni_threshold(alpha: float, m: int) -> float:
    """Per-comparison level ``alpha / C(m, 2)``."""
    if not 0 < alpha < 1:
        raise ParameterError("alpha must lie in (0, 1)")
    if m < 2:
        raise ParameterError("need at least two algorithms")
    return alpha / comb(m, 2)


def _annotate(exc: Exception, context: str) -> Exception:
    try:
        return type(exc)(f"{context}: {exc}")
    except TypeError:
        return exc


def pvalue_matrix(clouds: Sequence[PerformanceCloud], test: Union[str, TwoSampleTest] = "energy",
                  permutations: int = DEFAULT_PERMUTATIONS, seed: int = 0,
                  workers: Optional[int] = None) -> PValueMatrix:
    """All ``m(m-1)/2`` pairwise test p-values.

    The pair ``(l1, l2)`` uses the sub-seed ``derive_seed(seed, l1, l2)`` so
    each entry is independent of evaluation order.
    """
    if len(clouds) < 2:
        raise ParameterError("need at least two algorithms")
    dims = {c.dim for c in clouds}
    if len(dims) != 1:
        raise ParameterError("all clouds must share the same dimension")
    fn = TESTS[test] if isinstance(test, str) else test
    univariate = fn is ad2_test
    m = len(clouds)
    E = np.eye(m)
    for l1, l2 in itertools.combinations(range(m), 2):
        X, Y = clouds[l1].points, clouds[l2].points
        if univariate:
            X, Y = X[:, 0], Y[:, 0]
        try:
            res = fn(X, Y, permutations=permutations, seed=derive_seed(seed, l1, l2), workers=workers)
        except MoeaStatError as exc:
            raise _annotate(exc, f"{clouds[l1].algorithm} vs {clouds[l2].algorithm}") from exc
        E[l1, l2] = E[l2, l1] = res.p_value
    return PValueMatrix(tuple(c.algorithm for c in clouds), E)


def threshold_matrix(N: PValueMatrix, alpha: float = DEFAULT_ALPHA) -> ThresholdMatrix:
    t = bonferroni_threshold(alpha, len(N.algorithms))
    R = N.entries >= t
    R.setflags(write=False)
    return ThresholdMatrix(N.algorithms, R, alpha, t)


def transitivity_violations(R: np.ndarray) -> List[Tuple[int, int, int]]:
    """Triples ``(a, b, c)``, ``a < c``, with a~b and b~c but not a~c."""
    m = len(R)
    out = []
    for a, b, c in itertools.permutations(range(m), 3):
        if a < c and R[a, b] and R[b, c] and not R[a, c]:
            out.append((a, b, c))
    return sorted(out)


def connected_components(R: np.ndarray) -> List[List[int]]:
    """Components of the relation graph, each sorted, ordered by smallest member."""
    m = len(R)
    seen = [False] * m
    comps = []
    for start in range(m):
        if seen[start]:
            continue
        stack, comp = [start], []
        seen[start] = True
        while stack:
            i = stack.pop()
            comp.append(i)
            for j in np.flatnonzero(R[i]):
                if not seen[j]:
                    seen[j] = True
                    stack.append(int(j))
        comps.append(sorted(comp))
    return comps


def equivalence_classes(R: np.ndarray) -> List[List[int]]:
    """Classes ``{j : R[i, j]}``; equals the components when R is an equivalence."""
    classes = []
    for i in range(len(R)):
        cls = sorted(int(j) for j in np.flatnonzero(R[i]))
        if cls not in classes:
            classes.append(cls)
    return sorted(classes)


def threshold_and_partition(N: PValueMatrix, alpha: float = DEFAULT_ALPHA) -> GroupPartition:
    """Partition algorithms into groups of mutually indistinguishable ones.

    An intransitive relation is repaired by taking its transitive closure
    (connected components); the result is then flagged ``transitive=False``
    and the offending triples are listed.
    """
    R = threshold_matrix(N, alpha).entries
    algs = N.algorithms
    bad = transitivity_violations(R)
    groups = [tuple(algs[i] for i in comp) for comp in connected_components(R)]
    violations = [(algs[a], algs[b], algs[c]) for a, b, c in bad]
    return GroupPartition(tuple(groups), not bad, tuple(violations))


def fractional_ranks(ordered_groups: Sequence[Sequence[str]]) -> Dict[str, float]:
    """Each group shares the mean of the rank positions it spans."""
    ranks = {}
    position = 0
    for g in ordered_groups:
        shared = position + (len(g) + 1) / 2.0
        for a in g:
            ranks[a] = shared
        position += len(g)
    return ranks


def _stable_desc(keys: Sequence[float]) -> List[int]:
    return sorted(range(len(keys)), key=lambda i: -keys[i])


def dsc_rank(samples: Union[Mapping[str, Sequence[float]], Sequence[PerformanceCloud]],
             alpha: float = DEFAULT_ALPHA, permutations: int = DEFAULT_PERMUTATIONS, seed: int = 0,
             scenario: Optional[Tuple[str, int]] = None, workers: Optional[int] = None) -> RankTable:
    """Univariate DSC ranking with the two-sample Anderson-Darling test.

    Samples must be oriented so that larger is better. Groups are ordered by
    descending pooled mean and algorithms inherit fractional ranks.
    """
    if isinstance(samples, Mapping):
        clouds = [PerformanceCloud(a, np.asarray(v, dtype=float).reshape(-1, 1)) for a, v in samples.items()]
    else:
        clouds = list(samples)
    if any(c.dim != 1 for c in clouds):
        raise ParameterError("dsc_rank expects univariate samples")
    try:
        N = pvalue_matrix(clouds, "ad2", permutations, seed, workers)
    except MoeaStatError as exc:
        if scenario is None:
            raise
        raise _annotate(exc, f"scenario {scenario[0]}_{scenario[1]}D") from exc
    part = threshold_and_partition(N, alpha)
    by_alg = {c.algorithm: c.points[:, 0] for c in clouds}
    means = [float(np.concatenate([by_alg[a] for a in g]).mean()) for g in part.groups]
    ordered = [part.groups[i] for i in _stable_desc(means)]
    ranks = fractional_ranks(ordered)
    return RankTable(scenario, {c.algorithm: ranks[c.algorithm] for c in clouds})


def _check_tables(tables: Sequence[RankTable]) -> Tuple[str, ...]:
    if not tables:
        raise ParameterError("need at least one rank table")
    algs = tables[0].algorithms
    for t in tables[1:]:
        if set(t.algorithms) != set(algs):
            raise ConsistencyError("rank tables cover different algorithm sets")
    return algs


def ensemble_average(tables: Sequence[RankTable]) -> RankTable:
    """Per-algorithm mean rank across indicators."""
    algs = _check_tables(tables)
    return RankTable(tables[0].scenario,
                     {a: sum(t.ranks[a] for t in tables) / len(tables) for a in algs})


def ensemble_hierarchical(tables: Sequence[RankTable]) -> RankTable:
    """Majority vote: rank by number of indicators an algorithm wins.

    A win is attaining the best (lowest) rank in a table; ties all win. Equal
    win counts are ordered by the average-ensemble rank, and exact ties in
    both share a fractional rank.
    """
    algs = _check_tables(tables)
    avg = ensemble_average(tables).ranks
    wins = {a: 0 for a in algs}
    for t in tables:
        best = min(t.ranks.values())
        for a in algs:
            if t.ranks[a] == best:
                wins[a] += 1
    order = sorted(algs, key=lambda a: (-wins[a], avg[a]))
    ordered = [list(g) for _, g in itertools.groupby(order, key=lambda a: (wins[a], avg[a]))]
    ranks = fractional_ranks(ordered)
    return RankTable(tables[0].scenario, {a: ranks[a] for a in algs})


def mean_ranks(tables: Sequence[RankTable]) -> Dict[str, float]:
    """Mean rank of each algorithm over several tables (e.g. problems at fixed k)."""
    algs = _check_tables(tables)
    return {a: sum(t.ranks[a] for t in tables) / len(tables) for a in algs}


def ranks_from_ordering(ordered_groups: Sequence[Sequence[str]], algorithms: Sequence[str],
                        scenario: Optional[Tuple[str, int]] = None) -> RankTable:
    ranks = fractional_ranks(ordered_groups)
    return RankTable(scenario, {a: ranks[a] for a in algorithms})
