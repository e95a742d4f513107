"""Brute-force reference computations used as independent test oracles."""

import itertools
import math

import numpy as np


def hv_inclusion_exclusion(points, ref):
    """Union volume of boxes [q, ref] by inclusion-exclusion over all subsets."""
    pts = [np.asarray(q, dtype=float) for q in points]
    ref = np.asarray(ref, dtype=float)
    total = 0.0
    for size in range(1, len(pts) + 1):
        sign = 1.0 if size % 2 else -1.0
        for subset in itertools.combinations(pts, size):
            corner = np.max(subset, axis=0)
            total += sign * float(np.prod(np.clip(ref - corner, 0.0, None)))
    return total


def gd_double_loop(A, R, p):
    total = 0.0
    for a in A:
        best = math.inf
        for r in R:
            s = 0.0
            for c in range(len(a)):
                diff = float(a[c]) - float(r[c])
                s += diff * diff
            best = min(best, math.sqrt(s))
        total += best ** p
    return (total / len(A)) ** (1.0 / p)


def igd_double_loop(A, R, p):
    return gd_double_loop(R, A, p)


def separation_2d(theta, between, total):
    w = np.array([math.cos(theta), math.sin(theta)])
    return float(w @ between @ w) / float(w @ total @ w)


def angle_grid_max(between, total, step_deg):
    n = int(round(90.0 / step_deg))
    best = -math.inf
    for i in range(n + 1):
        best = max(best, separation_2d(math.radians(i * step_deg), between, total))
    return best


def group_means_covariance(groups):
    """Between-group scatter computed term by term."""
    means = [np.mean(np.asarray(g, dtype=float), axis=0) for g in groups]
    mu = sum(means) / len(means)
    p = len(mu)
    out = np.zeros((p, p))
    for m in means:
        out += np.outer(m - mu, m - mu)
    return out / len(means)
