"""Quality indicators for approximation sets (minimization convention).

Hypervolume is computed exactly by recursive slicing along the last
objective, or estimated by uniform Monte Carlo sampling when the number of
objectives exceeds ``hv_exact_max_k``. Distance indicators use Euclidean
nearest-neighbour distances aggregated by a power mean.
"""

from __future__ import annotations

import hashlib
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .data import MAXIMIZE, MINIMIZE, ApproximationSet, IndicatorDataset, IndicatorRecord, ReferenceData
from .errors import CapabilityError, DimensionError, ParameterError, ReferenceLookupError
from .seeding import MASK64, derive_seed

DEFAULT_HV_EXACT_MAX_K = 8
DEFAULT_MC_SAMPLES = 1_000_000
_MC_BLOCK = 2_000_000  # booleans per dominance-check block


@dataclass(frozen=True)
class IndicatorSpec:
    """An indicator to compute: ``kind`` is one of hv, gd, igd, delta.

    ``parameters`` may carry ``p`` (distance exponent, >= 1).
    """

    name: str
    orientation: str
    kind: str
    parameters: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.orientation not in (MAXIMIZE, MINIMIZE):
            raise ParameterError(f"bad orientation {self.orientation!r}")
        if self.kind not in ("hv", "gd", "igd", "delta"):
            raise ParameterError(f"unknown indicator kind {self.kind!r}")
        if "p" in self.parameters and float(self.parameters["p"]) < 1:
            raise ParameterError("distance exponent p must be >= 1")

    @classmethod
    def from_name(cls, name: str) -> "IndicatorSpec":
        """Build a spec from a short name: HV, GD, IGD, GDp, IGDp, Dp (e.g. ``D2``)."""
        if name == "HV":
            return cls(name, MAXIMIZE, "hv")
        match = re.fullmatch(r"(IGD|GD|D)(\d+(?:\.\d+)?)?", name)
        if not match:
            raise ParameterError(f"unknown indicator name {name!r}")
        kind = {"GD": "gd", "IGD": "igd", "D": "delta"}[match.group(1)]
        if kind == "delta" and match.group(2) is None:
            raise ParameterError("delta indicator needs an exponent, e.g. D2")
        p = float(match.group(2)) if match.group(2) else 2.0
        return cls(name, MINIMIZE, kind, {"p": p})


def _points(points) -> np.ndarray:
    if isinstance(points, ApproximationSet):
        return points.points
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    return arr


def _check_ref(P: np.ndarray, ref) -> np.ndarray:
    ref = np.asarray(ref, dtype=float)
    if ref.ndim != 1 or P.ndim != 2 or P.shape[1] != ref.shape[0]:
        raise DimensionError(f"points have {P.shape[-1]} objectives but reference point has {ref.size}")
    if P.shape[1] < 1:
        raise DimensionError("k must be >= 1")
    return ref


def nondominated(P: np.ndarray) -> np.ndarray:
    """Rows of ``P`` not weakly dominated by another row (duplicates collapsed)."""
    if len(P) <= 1:
        return P
    P = np.unique(P, axis=0)
    leq = np.all(P[:, None, :] <= P[None, :, :], axis=2)
    np.fill_diagonal(leq, False)
    # unique rows: j <= i componentwise with j != i means j dominates i
    return P[~leq.any(axis=0)]


def _hv_sweep2(P: np.ndarray, ref: np.ndarray) -> float:
    P = P[np.lexsort((P[:, 1], P[:, 0]))]
    volume = 0.0
    ceiling = ref[1]
    for x, y in P:
        if y < ceiling:
            volume += (ref[0] - x) * (ceiling - y)
            ceiling = y
    return volume


def _hv_slice(P: np.ndarray, ref: np.ndarray) -> float:
    k = P.shape[1]
    if k == 1:
        return float(ref[0] - P[:, 0].min())
    if k == 2:
        return _hv_sweep2(P, ref)
    P = P[np.argsort(P[:, -1], kind="stable")]
    volume = 0.0
    for i in range(len(P)):
        top = P[i + 1, -1] if i + 1 < len(P) else ref[-1]
        depth = top - P[i, -1]
        if depth > 0:
            volume += depth * _hv_slice(nondominated(P[: i + 1, :-1]), ref[:-1])
    return volume


def hypervolume_exact(points, ref_point, max_k: int = DEFAULT_HV_EXACT_MAX_K) -> float:
    """Exact hypervolume dominated by ``points`` and bounded by ``ref_point``.

    Points that do not strictly dominate the reference point contribute
    nothing.
    """
    P = _points(points)
    ref = _check_ref(P, ref_point)
    k = P.shape[1]
    if k > max_k:
        raise CapabilityError(f"exact hypervolume limited to k <= {max_k} (got k={k}); use hypervolume_mc")
    P = P[np.all(P < ref, axis=1)]
    if len(P) == 0:
        return 0.0
    return float(_hv_slice(nondominated(P), ref))


def hypervolume_mc(points, ref_point, samples: int = DEFAULT_MC_SAMPLES, seed: int = 0) -> float:
    """Monte Carlo hypervolume estimate.

    Samples uniformly in the box spanned by the componentwise minimum of the
    contributing points and ``ref_point``; the estimate is the dominated
    fraction times the box volume.
    """
    if int(samples) < 1:
        raise ParameterError("samples must be >= 1")
    P = _points(points)
    ref = _check_ref(P, ref_point)
    P = P[np.all(P < ref, axis=1)]
    if len(P) == 0:
        return 0.0
    P = nondominated(P)
    lower = P.min(axis=0)
    width = ref - lower
    rng = np.random.default_rng(int(seed) & MASK64)
    block = max(1, _MC_BLOCK // (len(P) * P.shape[1]))
    hits = 0
    remaining = int(samples)
    while remaining:
        size = min(block, remaining)
        u = lower + rng.random((size, P.shape[1])) * width
        hits += int(np.count_nonzero(np.any(np.all(P[None, :, :] <= u[:, None, :], axis=2), axis=1)))
        remaining -= size
    return hits / int(samples) * float(np.prod(width))


def _power_mean_nearest(A: np.ndarray, R: np.ndarray, p: float) -> float:
    """``((1/|A|) sum_a min_r ||a - r||^p)^(1/p)``.

    Squared distances accumulate component by component and the mean is a
    left-to-right sum, so the result is reproducible to the bit.
    """
    if len(A) == 0 or len(R) == 0:
        raise ParameterError("set and front must be non-empty")
    if A.shape[1] != R.shape[1]:
        raise DimensionError(f"dimension mismatch: {A.shape[1]} vs {R.shape[1]}")
    p = float(p)
    if p < 1:
        raise ParameterError("p must be >= 1")
    sq = np.zeros((len(A), len(R)))
    for c in range(A.shape[1]):
        diff = A[:, c, None] - R[None, :, c]
        sq += diff * diff
    nearest = np.sqrt(sq.min(axis=1))
    total = 0.0
    for d in nearest.tolist():
        total += d ** p
    return (total / len(A)) ** (1.0 / p)


def _front(front) -> np.ndarray:
    if isinstance(front, ReferenceData):
        return front.reference_front
    return _points(front)


def gd_p(points, front, p: float = 2.0) -> float:
    """Generational distance: power mean over the set of distances to the front."""
    return _power_mean_nearest(_points(points), _front(front), p)


def igd_p(points, front, p: float = 2.0) -> float:
    """Inverted generational distance: power mean over the front of distances to the set."""
    return _power_mean_nearest(_front(front), _points(points), p)


def delta_p(points, front, p: float = 2.0) -> float:
    """Averaged Hausdorff distance ``max(GD_p, IGD_p)``."""
    return max(gd_p(points, front, p), igd_p(points, front, p))


def _stable_key(s: ApproximationSet) -> int:
    text = f"{s.algorithm}\x1f{s.problem}\x1f{s.k}\x1f{s.run}".encode()
    return int.from_bytes(hashlib.blake2b(text, digest_size=8).digest(), "little")


def evaluate(spec: IndicatorSpec, s: ApproximationSet, ref: ReferenceData, *,
             hv_exact_max_k: int = DEFAULT_HV_EXACT_MAX_K, mc_samples: int = DEFAULT_MC_SAMPLES,
             seed: int = 0) -> float:
    p = float(spec.parameters.get("p", 2.0))
    if spec.kind == "hv":
        if s.k <= hv_exact_max_k:
            return hypervolume_exact(s, ref.hv_reference_point, max_k=hv_exact_max_k)
        return hypervolume_mc(s, ref.hv_reference_point, mc_samples, derive_seed(seed, _stable_key(s)))
    if spec.kind == "gd":
        return gd_p(s, ref, p)
    if spec.kind == "igd":
        return igd_p(s, ref, p)
    return delta_p(s, ref, p)


def compute_indicators(sets: Sequence[ApproximationSet], refs: Mapping[Tuple[str, int], ReferenceData],
                       specs: Sequence[IndicatorSpec], *, hv_exact_max_k: int = DEFAULT_HV_EXACT_MAX_K,
                       mc_samples: int = DEFAULT_MC_SAMPLES, seed: int = 0,
                       workers: Optional[int] = None) -> IndicatorDataset:
    """One record per (approximation set, indicator spec), in input order."""
    for s in sets:
        if s.scenario not in refs:
            raise ReferenceLookupError(f"no reference data for scenario {s.problem}/{s.k}D")

    def run(s: ApproximationSet) -> List[IndicatorRecord]:
        ref = refs[s.scenario]
        return [IndicatorRecord(s.algorithm, s.problem, s.k, s.run, spec.name,
                                evaluate(spec, s, ref, hv_exact_max_k=hv_exact_max_k,
                                         mc_samples=mc_samples, seed=seed))
                for spec in specs]

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(run, sets))
    else:
        batches = [run(s) for s in sets]
    return IndicatorDataset(rec for batch in batches for rec in batch)
