"""Pure-Python/numpy versions of the compiled scans in ``_core.pyx``."""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def _zero_runs(mask):
    padded = np.concatenate(([1], mask != 0, [1])).astype(np.int8)
    edges = np.diff(padded)
    starts = np.flatnonzero(edges == -1)
    ends = np.flatnonzero(edges == 1)
    return starts, ends - starts


def longest_zero_run(mask):
    starts, lengths = _zero_runs(np.asarray(mask))
    if lengths.size == 0:
        return 0, -1
    k = int(np.argmax(lengths))
    return int(lengths[k]), int(starts[k])


def first_one_run(mask, length):
    mask = np.asarray(mask)
    if length <= 0:
        return 0
    if length > mask.size:
        return -1
    prefix = np.concatenate(([0], np.cumsum(mask != 0)))
    hits = np.flatnonzero(prefix[length:] - prefix[:-length] == length)
    return int(hits[0]) if hits.size else -1


def first_ps_window(mask, gap, length):
    mask = np.asarray(mask)
    n = mask.size
    if length > n or length <= 0:
        return -1
    members = np.concatenate(([0], np.cumsum(mask != 0)))
    span = gap + 1
    bad = np.zeros(n + 1, dtype=np.int64)
    if span <= n:
        zero_prefix = np.concatenate(([0], np.cumsum(mask == 0)))
        is_bad = zero_prefix[span:] - zero_prefix[:-span] == span
        bad[1 : is_bad.size + 1] = np.cumsum(is_bad)
        bad[is_bad.size + 1 :] = bad[is_bad.size]
    for i in range(n - length + 1):
        if members[i + length] == members[i]:
            continue
        hi = i + length - 1 - gap
        if hi < i or bad[hi + 1] == bad[i]:
            return i
    return -1


def best_density(mask, min_span):
    mask = np.asarray(mask)
    n = mask.size
    prefix = np.concatenate(([0], np.cumsum(mask != 0))).astype(np.int64)
    best_c, best_l, best_start = -1, 1, 0
    for ln in range(min_span, min(2 * min_span - 1, n) + 1):
        sums = prefix[ln:] - prefix[:-ln]
        k = int(np.argmax(sums))
        c = int(sums[k])
        if best_c < 0 or c * best_l > best_c * ln:
            best_c, best_l, best_start = c, ln, k
    return best_c, best_l, best_start


def match_cylinder(data, pattern, first, count):
    data = np.asarray(data)
    pattern = np.asarray(pattern)
    k = pattern.size
    if count <= 0:
        return np.zeros(0, dtype=np.uint8)
    windows = sliding_window_view(data[first : first + count + k - 1], k)
    return np.all(windows == pattern, axis=1).astype(np.uint8)
