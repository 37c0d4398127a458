"""Compiled inner loops of the bit-flipping decoder.

Arrays: ``s`` is the length-``r`` syndrome and ``e`` the length-``2r`` error
estimate, both ``uint8`` 0/1 and updated in place; ``h0``/``h1`` are int64
supports of the first rows.  Column ``j`` of block ``b`` touches rows
``(j - k) mod r`` for ``k`` in the support.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def upc_count(s, h0, h1, r, j):
    if j < r:
        sup = h0
        c = j
    else:
        sup = h1
        c = j - r
    cnt = 0
    for k in sup:
        i = c - k
        if i < 0:
            i += r
        cnt += s[i]
    return cnt


@njit(cache=True)
def _flip_column(s, h0, h1, r, j):
    if j < r:
        sup = h0
        c = j
    else:
        sup = h1
        c = j - r
    for k in sup:
        i = c - k
        if i < 0:
            i += r
        s[i] ^= 1


@njit(cache=True)
def run_iteration(s, e, h0, h1, r, block, thr, weight, check_weight, flipped):
    """One decoding iteration over columns ``0..2r-1`` in blocks of ``block``.

    Counts in a block use the syndrome as it stood when the block started; flips
    of the block are applied before the next block is counted.  ``weight`` is
    the running syndrome weight, updated by ``d - 2*sigma`` per flip.
    Flipped column indices are written to ``flipped``.

    Returns ``(flips, weight, weight_mismatches)``; mismatches are only
    counted when ``check_weight`` is set (popcount after every flip).
    """
    n = 2 * r
    d = h0.shape[0]
    sigma = np.empty(min(block, n), dtype=np.int64)
    flips = 0
    mismatches = 0
    for start in range(0, n, block):
        stop = min(start + block, n)
        for j in range(start, stop):
            sigma[j - start] = upc_count(s, h0, h1, r, j)
        for j in range(start, stop):
            sj = sigma[j - start]
            if sj >= thr:
                e[j] ^= 1
                _flip_column(s, h0, h1, r, j)
                flipped[flips] = j
                flips += 1
                weight += d - 2 * sj
                if check_weight:
                    actual = 0
                    for i in range(r):
                        actual += s[i]
                    if actual != weight:
                        mismatches += 1
    return flips, weight, mismatches


@njit(cache=True)
def first_iteration_weights(s0, h0, h1, r, block, thresholds):
    """Syndrome weight after one iteration for each constant candidate threshold."""
    n = 2 * r
    m = thresholds.shape[0]
    out = np.empty(m, dtype=np.int64)
    if block >= n:
        # one shared snapshot: add columns in order of decreasing count
        sigma = np.empty(n, dtype=np.int64)
        for j in range(n):
            sigma[j] = upc_count(s0, h0, h1, r, j)
        order = np.argsort(-sigma, kind="mergesort")
        tord = np.argsort(-thresholds, kind="mergesort")
        s = s0.copy()
        weight = 0
        for i in range(r):
            weight += s[i]
        pos = 0
        for q in range(m):
            t = thresholds[tord[q]]
            while pos < n and sigma[order[pos]] >= t:
                j = order[pos]
                if j < r:
                    sup = h0
                    c = j
                else:
                    sup = h1
                    c = j - r
                for k in sup:
                    i = c - k
                    if i < 0:
                        i += r
                    weight += 1 - 2 * s[i]
                    s[i] ^= 1
                pos += 1
            out[tord[q]] = weight
        return out
    e = np.zeros(n, dtype=np.uint8)
    flipped = np.empty(n, dtype=np.int64)
    for q in range(m):
        s = s0.copy()
        e[:] = 0
        run_iteration(s, e, h0, h1, r, block, thresholds[q], 0, False, flipped)
        w = 0
        for i in range(r):
            w += s[i]
        out[q] = w
    return out
