# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot loops in ``_pykernels``.

Same signatures and results.  ``transversals`` handles up to 64 points and
64 non-backbone lines (bitsets in uint64); larger inputs are delegated to
the Python version by ``mubnet.kernels``.
"""
from libc.stdint cimport uint64_t
from libc.stdlib cimport malloc, free

import numpy as np


cdef struct _Search:
    int nlines
    int *line_start
    int *line_points
    uint64_t *point_lines
    int *chosen


cdef void _dfs(_Search *s, int i, uint64_t used, list found):
    cdef int k, p
    cdef uint64_t pl
    if i == s.nlines:
        found.append(tuple(sorted([s.chosen[k] for k in range(s.nlines)])))
        return
    for k in range(s.line_start[i], s.line_start[i + 1]):
        p = s.line_points[k]
        pl = s.point_lines[p]
        if pl & used:
            continue
        s.chosen[i] = p
        _dfs(s, i + 1, used | pl, found)


def transversals(int n_points, classes):
    if not classes:
        return []
    cdef list backbone = [[p for p in range(n_points) if (mask >> p) & 1] for mask in classes[0]]
    cdef int nlines = len(backbone)
    cdef int total = sum(len(b) for b in backbone)
    cdef int other = sum(len(c) for c in classes[1:])
    if n_points > 64 or other > 64:
        raise ValueError("compiled transversal search supports at most 64 points and lines")
    cdef _Search s
    s.nlines = nlines
    s.line_start = <int *> malloc((nlines + 1) * sizeof(int))
    s.line_points = <int *> malloc(max(total, 1) * sizeof(int))
    s.point_lines = <uint64_t *> malloc(max(n_points, 1) * sizeof(uint64_t))
    s.chosen = <int *> malloc(max(nlines, 1) * sizeof(int))
    cdef int i, j, pos = 0, bit = 0, p
    cdef list found = []
    try:
        for i in range(nlines):
            s.line_start[i] = pos
            for p in backbone[i]:
                s.line_points[pos] = p
                pos += 1
        s.line_start[nlines] = pos
        for p in range(n_points):
            s.point_lines[p] = 0
        for cls in classes[1:]:
            for mask in cls:
                for p in range(n_points):
                    if (mask >> p) & 1:
                        s.point_lines[p] |= (<uint64_t> 1) << bit
                bit += 1
        _dfs(&s, 0, 0, found)
    finally:
        free(s.line_start)
        free(s.line_points)
        free(s.point_lines)
        free(s.chosen)
    found.sort()
    return found


def divisor_gaps(long dmax):
    cdef long n_alloc = dmax + 1 if dmax >= 1 else 2
    cdef long[::1] spf = np.arange(n_alloc, dtype=np.int64)
    gaps_arr = np.zeros(n_alloc, dtype=np.int64)
    cdef long[::1] gaps = gaps_arr
    cdef long i, j, d, n, p, e, best, x, y, nd, nnew, t, q
    cdef long divs[4096]
    cdef long tmp[4096]
    if dmax < 2:
        return [0] * (dmax + 1 if dmax >= 0 else 0)
    i = 2
    while i * i <= dmax:
        if spf[i] == i:
            j = i * i
            while j <= dmax:
                if spf[j] == j:
                    spf[j] = i
                j += i
        i += 1
    for d in range(2, dmax + 1):
        n = d
        nd = 1
        divs[0] = 1
        while n > 1:
            p = spf[n]
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            e *= 2
            nnew = 0
            for t in range(nd):
                y = divs[t]
                for q in range(e + 1):
                    if y >= d:
                        break
                    if nnew >= 4096:
                        raise OverflowError("too many divisors for the fixed buffer")
                    tmp[nnew] = y
                    nnew += 1
                    y *= p
            for t in range(nnew):
                divs[t] = tmp[t]
            nd = nnew
        best = 1
        for t in range(nd):
            x = divs[t]
            if x > best and x < d:
                best = x
        gaps[d] = d - best
    return [int(v) for v in gaps_arr[:dmax + 1]]


def subgroup_closure(moduli, generators):
    cdef int r = len(moduli)
    cdef long size = 1
    cdef int k
    for k in range(r):
        size *= moduli[k]
    cdef long[::1] mods = np.asarray(moduli, dtype=np.int64)
    cdef long[::1] stride = np.ones(r, dtype=np.int64)
    for k in range(r - 2, -1, -1):
        stride[k] = stride[k + 1] * mods[k + 1]
    cdef int ng = len(generators)
    gen_arr = np.zeros((max(ng, 1), r), dtype=np.int64)
    for k in range(ng):
        gen_arr[k, :] = [int(generators[k][c]) % int(moduli[c]) for c in range(r)]
    cdef long[:, ::1] gens = gen_arr
    seen_arr = np.zeros(size, dtype=np.uint8)
    cdef unsigned char[::1] seen = seen_arr
    queue_arr = np.zeros(size, dtype=np.int64)
    cdef long[::1] queue = queue_arr
    cdef long head = 0, tail = 1, x, y, code, rem, digit, c
    cdef int g
    seen[0] = 1
    queue[0] = 0
    while head < tail:
        x = queue[head]
        head += 1
        for g in range(ng):
            code = 0
            rem = x
            for c in range(r):
                digit = rem // stride[c]
                rem = rem - digit * stride[c]
                code += ((digit + gens[g, c]) % mods[c]) * stride[c]
            if not seen[code]:
                seen[code] = 1
                queue[tail] = code
                tail += 1
    codes = np.sort(queue_arr[:tail])
    out = []
    for x in codes:
        rem = x
        elem = []
        for c in range(r):
            digit = rem // stride[c]
            rem = rem - digit * stride[c]
            elem.append(int(digit))
        out.append(tuple(elem))
    return out
