"""Counter-based random streams.

Every random draw is a pure function of ``(seed, counter...)`` so results do
not depend on evaluation order or on how work is split across threads.
"""

import numpy as np

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix_int(x: int) -> int:
    x = (x + _GOLDEN) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def _mix_array(x: np.ndarray) -> np.ndarray:
    # uint64 array arithmetic wraps silently, which is what splitmix64 needs
    x = x + np.uint64(_GOLDEN)
    x = (x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    x = (x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return x ^ (x >> np.uint64(31))


def derive_seed(seed: int, *keys: int) -> int:
    """Derive an independent 64-bit sub-seed from ``seed`` and integer keys."""
    h = _mix_int(int(seed) & MASK64)
    for key in keys:
        h = _mix_int(h ^ _mix_int(int(key) & MASK64))
    return h


def permutation_masks(seed: int, start: int, stop: int, n: int, total: int) -> np.ndarray:
    """Membership masks for relabelings ``start..stop-1`` of a pooled sample.

    Row ``b`` marks which of the ``total`` pooled positions go to the first
    sample (exactly ``n`` of them) under the ``b``-th random relabeling. Each
    row depends only on ``(seed, b)``.
    """
    rows = np.arange(start, stop, dtype=np.uint64)
    base = np.uint64(int(seed) & MASK64)
    streams = _mix_array(base ^ _mix_array(rows * np.uint64(_GOLDEN) + np.uint64(1)))
    cols = np.arange(total, dtype=np.uint64)
    keys = _mix_array(streams[:, None] + cols[None, :] * np.uint64(_GOLDEN))
    order = np.argsort(keys, axis=1, kind="stable")
    mask = np.zeros((stop - start, total), dtype=bool)
    np.put_along_axis(mask, order[:, :n], True, axis=1)
    return mask
