# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled kernels for the metric hot loops.

Mirrors the API of ``mcqforge._kernels_py``; ``mcqforge.kernels`` picks
whichever is importable.
"""

import numpy as np


def lcs_length_ids(a, b):
    """Length of the longest common subsequence of two int64 id arrays."""
    cdef long long[::1] av = np.ascontiguousarray(a, dtype=np.int64)
    cdef long long[::1] bv = np.ascontiguousarray(b, dtype=np.int64)
    cdef Py_ssize_t n = av.shape[0]
    cdef Py_ssize_t m = bv.shape[0]
    if n == 0 or m == 0:
        return 0
    prev_arr = np.zeros(m + 1, dtype=np.int64)
    cur_arr = np.zeros(m + 1, dtype=np.int64)
    cdef long long[::1] prev = prev_arr
    cdef long long[::1] cur = cur_arr
    cdef long long[::1] tmp
    cdef Py_ssize_t i, j
    cdef long long ai, up, left
    for i in range(n):
        ai = av[i]
        for j in range(m):
            if ai == bv[j]:
                cur[j + 1] = prev[j] + 1
            else:
                up = prev[j + 1]
                left = cur[j]
                cur[j + 1] = up if up >= left else left
        tmp = prev
        prev = cur
        cur = tmp
    return int(prev[m])


cdef object _pack(long long[::1] ids, Py_ssize_t start, int n):
    # ids come from a dense local mapping, so 32-bit shifts cannot collide
    cdef object key = 0
    cdef int k
    for k in range(n):
        key = (key << 32) | <object>ids[start + k]
    return key


def ngram_clip(hyp, refs, int n):
    """Clipped n-gram matches of ``hyp`` against one or more references."""
    cdef long long[::1] hv = np.ascontiguousarray(hyp, dtype=np.int64)
    cdef Py_ssize_t total = hv.shape[0] - n + 1
    if total <= 0:
        return (0, 0)
    ref_max = {}
    cdef long long[::1] rv
    cdef Py_ssize_t i, rn
    cdef object key
    for ref in refs:
        rv = np.ascontiguousarray(ref, dtype=np.int64)
        rn = rv.shape[0] - n + 1
        counts = {}
        for i in range(rn):
            key = _pack(rv, i, n)
            counts[key] = counts.get(key, 0) + 1
        for key, c in counts.items():
            if c > ref_max.get(key, 0):
                ref_max[key] = c
    hyp_counts = {}
    for i in range(total):
        key = _pack(hv, i, n)
        hyp_counts[key] = hyp_counts.get(key, 0) + 1
    cdef long long clipped = 0
    for key, c in hyp_counts.items():
        m = ref_max.get(key, 0)
        clipped += c if c < m else m
    return (int(clipped), int(total))
