"""Two-sample tests with permutation p-values.

Two tests are provided:

* the energy-distance E-test for multivariate samples, and
* the two-sample Anderson-Darling test (Scholz & Stephens, midrank version)
  for univariate samples.

Both report ``(1 + #{T_b >= T_obs}) / (B + 1)`` where ``T_b`` is the statistic
on the ``b``-th random relabeling of the pooled sample. Relabelings come from
:func:`moeastat.seeding.permutation_masks`, so the p-value is a pure function
of the data, ``B`` and ``seed``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.spatial.distance import cdist

from .errors import DegenerateDataError, DimensionError, ParameterError
from .seeding import permutation_masks

DEFAULT_PERMUTATIONS = 999
_CHUNK = 256


@dataclass(frozen=True)
class TestResult:
    __test__ = False  # keep pytest from collecting this class

    statistic: float
    p_value: float
    permutations: int
    seed: int


def _as_samples(X, Y):
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if Y.ndim == 1:
        Y = Y[:, None]
    if X.ndim != 2 or Y.ndim != 2:
        raise DimensionError("samples must be lists of vectors")
    if len(X) == 0 or len(Y) == 0:
        raise ParameterError("both samples must be non-empty")
    if X.shape[1] != Y.shape[1]:
        raise DimensionError(f"dimension mismatch: {X.shape[1]} vs {Y.shape[1]}")
    return X, Y


def _canonical_sum(a: np.ndarray) -> float:
    # summing in sorted order makes the result independent of argument order
    return float(np.sort(a, axis=None).sum())


def energy_statistic(X, Y) -> float:
    """Two-sample energy statistic of Székely and Rizzo.

    ``E = nm/(n+m) * [2/(nm) sum|x-y| - 1/n^2 sum|x-x'| - 1/m^2 sum|y-y'|]``
    with Euclidean distances. Exactly symmetric in its arguments.
    """
    X, Y = _as_samples(X, Y)
    n, m = len(X), len(Y)
    between = _canonical_sum(cdist(X, Y))
    within_x = _canonical_sum(cdist(X, X))
    within_y = _canonical_sum(cdist(Y, Y))
    value = (n * m / (n + m)) * (2.0 * between / (n * m) - (within_x / n**2 + within_y / m**2))
    return max(value, 0.0)


def _energy_from_masks(D: np.ndarray, row_sums: np.ndarray, total: float, masks: np.ndarray, n: int, m: int):
    Z = masks.astype(float)
    DZ = Z @ D
    sxx = np.einsum("ij,ij->i", DZ, Z)
    sxy = Z @ row_sums - sxx
    syy = total - sxx - 2.0 * sxy
    return (n * m / (n + m)) * (2.0 * sxy / (n * m) - sxx / n**2 - syy / m**2)


def _check_permutations(permutations):
    if int(permutations) < 1:
        raise ParameterError("permutations must be >= 1")
    return int(permutations)


def _permutation_count(stat_of_masks: Callable[[np.ndarray], np.ndarray], observed: float, tol: float,
                       n: int, total: int, permutations: int, seed: int, workers: Optional[int]) -> int:
    # relabelings are indexed 1..B; index 0 is reserved for the observed labeling
    bounds = [(s, min(s + _CHUNK, permutations + 1)) for s in range(1, permutations + 1, _CHUNK)]

    def count(bound):
        masks = permutation_masks(seed, bound[0], bound[1], n, total)
        return int(np.count_nonzero(stat_of_masks(masks) >= observed - tol))

    if workers is not None and workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return sum(pool.map(count, bounds))
    return sum(count(b) for b in bounds)


def energy_test(X, Y, permutations: int = DEFAULT_PERMUTATIONS, seed: int = 0,
                workers: Optional[int] = None) -> TestResult:
    """Permutation E-test for equality of two multivariate distributions."""
    X, Y = _as_samples(X, Y)
    B = _check_permutations(permutations)
    n, m = len(X), len(Y)
    if n + m < 3:
        raise ParameterError("energy test needs at least 3 pooled observations")
    pooled = np.vstack([X, Y])
    D = cdist(pooled, pooled)
    row_sums = D.sum(axis=0)
    total = float(row_sums.sum())
    N = n + m

    def stat(masks):
        return _energy_from_masks(D, row_sums, total, masks, n, m)

    identity = np.zeros((1, N), dtype=bool)
    identity[0, :n] = True
    observed = float(stat(identity)[0])
    tol = 1e-12 * N * float(D.max(initial=0.0))
    exceed = _permutation_count(stat, observed, tol, n, N, B, seed, workers)
    return TestResult(energy_statistic(X, Y), (1 + exceed) / (B + 1), B, int(seed))


class _AndersonDarlingTwoSample:
    """Midrank two-sample Anderson-Darling statistic over a fixed pooled sample.

    The pooled order statistics and tie structure are fixed; only the split
    into samples varies, so many relabelings can be scored in one pass.
    """

    def __init__(self, pooled: np.ndarray, n: int):
        N = len(pooled)
        m = N - n
        if n < 2 or m < 2:
            raise ParameterError("Anderson-Darling test needs at least 2 observations per sample")
        order = np.argsort(pooled, kind="stable")
        ordered = pooled[order]
        distinct, starts, counts = np.unique(ordered, return_index=True, return_counts=True)
        if len(distinct) < 2:
            raise DegenerateDataError("all pooled values are identical")
        self.order = order
        self.starts = starts
        self.ties = counts.astype(float)
        self.n, self.m, self.N = n, m, N
        below = np.cumsum(counts) - counts
        self.mid_below = below + self.ties / 2.0
        self.denominator = self.mid_below * (N - self.mid_below) - N * self.ties / 4.0
        self.mean, self.scale = _ad_standardization(np.array([n, m], dtype=float), N)

    def raw(self, masks: np.ndarray) -> np.ndarray:
        N, l, Ba = self.N, self.ties, self.mid_below
        in_first = masks[:, self.order].astype(float)
        f1 = np.add.reduceat(in_first, self.starts, axis=1)
        f2 = l - f1
        M1 = np.cumsum(f1, axis=1) - f1 / 2.0
        M2 = np.cumsum(f2, axis=1) - f2 / 2.0
        term1 = (l * (N * M1 - Ba * self.n) ** 2 / self.denominator).sum(axis=1) / self.n
        term2 = (l * (N * M2 - Ba * self.m) ** 2 / self.denominator).sum(axis=1) / self.m
        return (N - 1.0) / N**2 * (term1 + term2)

    def standardized(self, masks: np.ndarray) -> np.ndarray:
        return (self.raw(masks) - self.mean) / self.scale


def _ad_standardization(sizes: np.ndarray, N: int):
    """Null mean and standard deviation of the k-sample A^2 statistic."""
    k = len(sizes)
    H = float((1.0 / sizes).sum())
    h = float((1.0 / np.arange(1, N)).sum())
    # g = sum_{i=1}^{N-2} sum_{j=i+1}^{N-1} 1 / ((N - i) j)
    inv_j = 1.0 / np.arange(1, N)
    tail = np.cumsum(inv_j[::-1])[::-1]  # tail[t] = sum_{j=t+1}^{N-1} 1/j
    i = np.arange(1, N - 1)
    g = float((tail[i] / (N - i)).sum())
    a = (4 * g - 6) * (k - 1) + (10 - 6 * g) * H
    b = (2 * g - 4) * k**2 + 8 * h * k + (2 * g - 14 * h - 4) * H - 8 * h + 4 * g - 6
    c = (6 * h + 2 * g - 2) * k**2 + (4 * h - 4 * g + 6) * k + (2 * h - 6) * H + 4 * h
    d = (2 * h + 6) * k**2 - 4 * h * k
    var = (a * N**3 + b * N**2 + c * N + d) / ((N - 1.0) * (N - 2.0) * (N - 3.0))
    return float(k - 1), float(np.sqrt(var))


def _univariate(x, y):
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ParameterError("samples must be finite")
    return x, y


def ad2_statistic(x, y) -> float:
    """Standardized two-sample Anderson-Darling statistic (midrank ties).

    Depends on the data only through the pooled ranks, so any strictly
    increasing transform of both samples leaves it unchanged.
    """
    x, y = _univariate(x, y)
    ad = _AndersonDarlingTwoSample(np.concatenate([x, y]), len(x))
    mask = np.zeros((1, ad.N), dtype=bool)
    mask[0, : len(x)] = True
    return float(ad.standardized(mask)[0])


def ad2_test(x, y, permutations: int = DEFAULT_PERMUTATIONS, seed: int = 0,
             workers: Optional[int] = None) -> TestResult:
    """Permutation two-sample Anderson-Darling test."""
    x, y = _univariate(x, y)
    B = _check_permutations(permutations)
    ad = _AndersonDarlingTwoSample(np.concatenate([x, y]), len(x))
    identity = np.zeros((1, ad.N), dtype=bool)
    identity[0, : len(x)] = True
    observed = float(ad.raw(identity)[0])
    tol = 1e-12 * max(1.0, abs(observed))
    exceed = _permutation_count(ad.raw, observed, tol, len(x), ad.N, B, seed, workers)
    statistic = (observed - ad.mean) / ad.scale
    return TestResult(float(statistic), (1 + exceed) / (B + 1), B, int(seed))
