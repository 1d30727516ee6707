# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled scans over 0/1 membership masks.

Every function here has a twin of the same name and signature in
``_fallback.py``; the two are checked against each other in the test suite.
"""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def longest_zero_run(const unsigned char[::1] mask):
    cdef Py_ssize_t n = mask.shape[0], i, run = 0, best = 0, best_start = -1, start = 0
    for i in range(n):
        if mask[i] == 0:
            if run == 0:
                start = i
            run += 1
            if run > best:
                best = run
                best_start = start
        else:
            run = 0
    return best, best_start


def first_one_run(const unsigned char[::1] mask, Py_ssize_t length):
    cdef Py_ssize_t n = mask.shape[0], i, run = 0
    if length <= 0:
        return 0
    for i in range(n):
        if mask[i]:
            run += 1
            if run >= length:
                return i - length + 1
        else:
            run = 0
    return -1


def first_ps_window(const unsigned char[::1] mask, Py_ssize_t gap, Py_ssize_t length):
    """First start of a length-``length`` window with a member and no hole longer than ``gap``."""
    cdef Py_ssize_t n = mask.shape[0], i, run = 0, hi_s
    if length > n or length <= 0:
        return -1
    # bad_start counts starts s of all-zero stretches mask[s..s+gap]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] bad_start = np.zeros(n + 1, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] mem_prefix = np.zeros(n + 1, dtype=np.int64)
    for i in range(n):
        mem_prefix[i + 1] = mem_prefix[i] + (1 if mask[i] else 0)
        if mask[i] == 0:
            run += 1
        else:
            run = 0
        if run >= gap + 1:
            bad_start[i - gap + 1] += 1
    for i in range(n):
        bad_start[i + 1] += bad_start[i]
    for i in range(n - length + 1):
        if mem_prefix[i + length] - mem_prefix[i] == 0:
            continue
        hi_s = i + length - 1 - gap
        if hi_s < i or bad_start[hi_s + 1] - bad_start[i] == 0:
            return i
    return -1


def best_density(const unsigned char[::1] mask, Py_ssize_t min_span):
    """Densest interval among spans in [min_span, 2*min_span - 1]; ties keep shortest, then leftmost."""
    cdef Py_ssize_t n = mask.shape[0], i, ln, top, arg
    cdef long long best_c = -1, best_l = 1, c, row_max
    cdef Py_ssize_t best_start = 0, best_len = 0
    prefix_arr = np.zeros(n + 1, dtype=np.int64)
    cdef long long[::1] prefix = prefix_arr
    for i in range(n):
        prefix[i + 1] = prefix[i] + (1 if mask[i] else 0)
    top = 2 * min_span - 1
    if top > n:
        top = n
    for ln in range(min_span, top + 1):
        # leftmost maximum for this length, then one ratio comparison
        row_max = -1
        arg = 0
        for i in range(n - ln + 1):
            c = prefix[i + ln] - prefix[i]
            if c > row_max:
                row_max = c
                arg = i
        if best_c < 0 or row_max * best_l > best_c * ln:
            best_c = row_max
            best_l = ln
            best_start = arg
            best_len = ln
    return int(best_c), int(best_len), int(best_start)


def match_cylinder(const unsigned char[::1] data, const unsigned char[::1] pattern,
                   Py_ssize_t first, Py_ssize_t count):
    """mask[t] = 1 iff data[first + t + j] == pattern[j] for every j."""
    cdef Py_ssize_t k = pattern.shape[0], t, j
    out = np.zeros(count, dtype=np.uint8)
    cdef unsigned char[::1] o = out
    for t in range(count):
        for j in range(k):
            if data[first + t + j] != pattern[j]:
                break
        else:
            o[t] = 1
    return out
