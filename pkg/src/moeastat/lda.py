"""Post-hoc linear discriminant analysis with non-negative weights.

Given algorithm groups in the normalized performance space, find ``w >= 0``
maximizing the separation ``S(w) = w'Σw / w'Cw``, where ``Σ`` is the
covariance of the group means and ``C`` the covariance of all points. The
projections ``w'x`` ("LD values") then order the groups by their mean.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg

from .data import PerformanceCloud
from .dsc import GroupPartition
from .errors import DegenerateDataError, DimensionError, ParameterError
from .seeding import MASK64, derive_seed

GRID_STEP_DEG = 0.01
RESTARTS = 20
FALLBACK_MARGIN = 1e-9
RIDGE_FACTOR = 1e-9
# exhaustive face enumeration is exact but visits 2^p - 1 supports
MAX_ENUMERATION_DIM = 12


@dataclass(frozen=True)
class LdaResult:
    weights: np.ndarray
    used_fallback: bool
    separation: float
    ld_values: Dict[str, np.ndarray] = field(default_factory=dict, repr=False)
    group_means: Dict[int, float] = field(default_factory=dict)
    ranking: Tuple[int, ...] = ()

    def to_dict(self) -> dict:
        return {
            "weights": self.weights.tolist(),
            "used_fallback": self.used_fallback,
            "separation": self.separation,
            "ld_values": {a: v.tolist() for a, v in self.ld_values.items()},
            "group_means": {str(i): m for i, m in self.group_means.items()},
            "ranking": list(self.ranking),
        }


def _as_groups(groups) -> List[np.ndarray]:
    out = [np.atleast_2d(np.asarray(g, dtype=float)) for g in groups]
    if not out:
        raise ParameterError("need at least one group")
    if any(g.size == 0 for g in out):
        raise ParameterError("groups must be non-empty")
    dims = {g.shape[1] for g in out}
    if len(dims) != 1:
        raise DimensionError("all groups must share the same dimension")
    if dims.pop() < 1:
        raise ParameterError("dimension must be >= 1")
    return out


def between_scatter(groups) -> np.ndarray:
    """Covariance of the group means around their unweighted average."""
    groups = _as_groups(groups)
    if len(groups) < 2:
        raise DegenerateDataError("between-group scatter needs at least two groups")
    means = np.array([g.mean(axis=0) for g in groups])
    centered = means - means.mean(axis=0)
    return centered.T @ centered / len(groups)


def total_covariance(points) -> np.ndarray:
    """Sample covariance (denominator N - 1) of all points."""
    X = np.atleast_2d(np.asarray(points, dtype=float))
    if len(X) < 2:
        raise ParameterError("covariance needs at least two points")
    centered = X - X.mean(axis=0)
    return centered.T @ centered / (len(X) - 1)


def separation(w, between: np.ndarray, total: np.ndarray) -> float:
    w = np.asarray(w, dtype=float)
    den = float(w @ total @ w)
    if den <= 0:
        return 0.0
    return float(w @ between @ w) / den


def _separation_many(W: np.ndarray, between: np.ndarray, total: np.ndarray) -> np.ndarray:
    num = np.einsum("ij,jk,ik->i", W, between, W)
    den = np.einsum("ij,jk,ik->i", W, total, W)
    return num / den


def _regularize(total: np.ndarray) -> np.ndarray:
    p = len(total)
    trace = float(np.trace(total))
    if np.linalg.eigvalsh(total)[0] > 1e-12 * trace:
        return total
    return total + RIDGE_FACTOR * trace / p * np.eye(p)


def _unit(w: np.ndarray) -> np.ndarray:
    w = np.clip(w, 0.0, None)
    return w / np.linalg.norm(w)


def _angle_search(between, total) -> np.ndarray:
    """Grid scan of the quarter circle, then golden-section refinement."""
    theta = np.deg2rad(np.arange(0.0, 90.0 + GRID_STEP_DEG / 2, GRID_STEP_DEG))
    theta[-1] = np.pi / 2
    S = _separation_many(np.column_stack([np.cos(theta), np.sin(theta)]), between, total)
    best = int(np.argmax(S))
    step = np.deg2rad(GRID_STEP_DEG)
    lo, hi = max(0.0, theta[best] - step), min(np.pi / 2, theta[best] + step)

    def f(t):
        return separation([np.cos(t), np.sin(t)], between, total)

    ratio = (np.sqrt(5.0) - 1) / 2
    a, b = lo, hi
    c, d = b - ratio * (b - a), a + ratio * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(60):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - ratio * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + ratio * (b - a)
            fd = f(d)
    candidates = [theta[best], (a + b) / 2]
    t = max(candidates, key=f)
    return np.array([np.cos(t), np.sin(t)])


def _face_enumeration(between, total) -> Optional[np.ndarray]:
    """Exact constrained maximizer via stationary points on every orthant face."""
    p = len(between)
    best, best_s = None, -np.inf
    for size in range(1, p + 1):
        for support in itertools.combinations(range(p), size):
            idx = np.array(support)
            vals, vecs = scipy.linalg.eigh(between[np.ix_(idx, idx)], total[np.ix_(idx, idx)])
            for j in range(len(vals)):
                v = vecs[:, j]
                if np.all(v < 0):
                    v = -v
                if not np.all(v > 0):
                    continue
                w = np.zeros(p)
                w[idx] = v
                s = separation(w, between, total)
                if s > best_s:
                    best, best_s = w, s
    return None if best is None else _unit(best)


def _projected_ascent(w, between, total, iters: int = 500) -> np.ndarray:
    w = _unit(w)
    s = separation(w, between, total)
    for _ in range(iters):
        den = float(w @ total @ w)
        grad = 2.0 * (between @ w - s * (total @ w)) / den
        step = 1.0
        improved = False
        while step > 1e-12:
            cand = np.clip(w + step * grad, 0.0, None)
            if np.any(cand > 0):
                cand = cand / np.linalg.norm(cand)
                s_new = separation(cand, between, total)
                if s_new > s:
                    improved = s_new - s > 1e-15 * max(1.0, abs(s))
                    w, s = cand, s_new
                    break
            step /= 2.0
        if not improved:
            break
    return w


def maximize_separation(between: np.ndarray, total: np.ndarray, seed: int = 0) -> np.ndarray:
    """Unit ``w >= 0`` maximizing ``w'Σw / w'Cw`` (``total`` must be positive definite)."""
    between = np.asarray(between, dtype=float)
    total = np.asarray(total, dtype=float)
    p = len(between)
    if p == 1:
        return np.ones(1)
    if p == 2:
        return _unit(_angle_search(between, total))
    starts = [np.full(p, 1.0 / np.sqrt(p))]
    for r in range(RESTARTS):
        rng = np.random.default_rng(derive_seed(seed, r) & MASK64)
        starts.append(rng.random(p))
    candidates = [_projected_ascent(w, between, total) for w in starts]
    if p <= MAX_ENUMERATION_DIM:
        exact = _face_enumeration(between, total)
        if exact is not None:
            candidates.append(exact)
    return _unit(max(candidates, key=lambda w: separation(w, between, total)))


def lda_weights(groups, seed: int = 0) -> LdaResult:
    """Non-negative unit weights maximizing group separation.

    Falls back to equal weights (``used_fallback=True``) when there is a
    single group, when the group means coincide, or when no feasible
    direction beats equal weights by more than ``FALLBACK_MARGIN``.
    """
    groups = _as_groups(groups)
    p = groups[0].shape[1]
    equal = np.full(p, 1.0 / np.sqrt(p))
    points = np.vstack(groups)
    if len(groups) < 2 or len(points) < 2:
        return LdaResult(equal, True, 0.0)
    between = between_scatter(groups)
    total = total_covariance(points)
    scale = float(np.trace(total))
    if scale <= 0 or np.abs(between).max() <= 1e-12 * scale:
        return LdaResult(equal, True, 0.0)
    total = _regularize(total)
    w = maximize_separation(between, total, seed)
    s_equal = separation(equal, between, total)
    s_best = separation(w, between, total)
    if not s_best > s_equal + FALLBACK_MARGIN:
        return LdaResult(equal, True, s_equal)
    return LdaResult(_unit(w), False, s_best)


def _cloud_map(clouds) -> Dict[str, np.ndarray]:
    if isinstance(clouds, Mapping):
        return {a: np.atleast_2d(np.asarray(v, dtype=float)) for a, v in clouds.items()}
    return {c.algorithm: c.points for c in clouds}


def ld_values(clouds: Union[Sequence[PerformanceCloud], Mapping[str, np.ndarray]], weights) -> Dict[str, np.ndarray]:
    """Project every run onto ``weights``."""
    w = np.asarray(weights, dtype=float)
    out = {}
    for alg, pts in _cloud_map(clouds).items():
        if pts.shape[1] != w.size:
            raise DimensionError(f"{alg}: points have {pts.shape[1]} components, weights {w.size}")
        out[alg] = pts @ w
    return out


def rank_groups(partition: GroupPartition, values: Mapping[str, Sequence[float]]) -> Tuple[Dict[int, float], Tuple[int, ...]]:
    """Pooled mean LD value per group and group indices sorted by it (descending, stable)."""
    means = {}
    for i, g in enumerate(partition.groups):
        try:
            pooled = np.concatenate([np.asarray(values[a], dtype=float).ravel() for a in g])
        except KeyError as exc:
            raise ParameterError(f"no LD values for algorithm {exc.args[0]!r}") from None
        means[i] = float(pooled.mean())
    ranking = tuple(sorted(means, key=lambda i: -means[i]))
    return means, ranking


def analyze(clouds: Sequence[PerformanceCloud], partition: GroupPartition, seed: int = 0) -> LdaResult:
    """Weights, LD values and group ranking for one scenario."""
    by_alg = _cloud_map(clouds)
    groups = [np.vstack([by_alg[a] for a in g]) for g in partition.groups]
    fit = lda_weights(groups, seed)
    values = ld_values(clouds, fit.weights)
    means, ranking = rank_groups(partition, values)
    return LdaResult(fit.weights, fit.used_fallback, fit.separation, values, means, ranking)
