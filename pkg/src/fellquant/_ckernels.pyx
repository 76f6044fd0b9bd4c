# cython: language_level=3
"""Compiled versions of the loops in ``_pykernels``; same signatures."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def assoc_violation(cnp.int64_t[:, ::1] table):
    cdef Py_ssize_t n = table.shape[0]
    cdef Py_ssize_t a, b, c
    cdef cnp.int64_t ab, bc, left, right
    for a in range(n):
        for b in range(n):
            ab = table[a, b]
            if ab < 0:
                continue
            for c in range(n):
                bc = table[b, c]
                if bc < 0:
                    continue
                left = table[ab, c]
                right = table[a, bc]
                if left < 0 or right < 0 or left != right:
                    return (a, b, c)
    return None


def set_product(u, v, cnp.int64_t[:, ::1] table):
    cdef Py_ssize_t n = table.shape[0]
    if n > 64:
        from ._pykernels import set_product as slow
        return slow(u, v, np.asarray(table))
    cdef unsigned long long uu = u
    cdef unsigned long long vv = v
    cdef unsigned long long out = 0
    cdef Py_ssize_t g, h
    cdef cnp.int64_t k
    for g in range(n):
        if not (uu >> g) & 1ULL:
            continue
        for h in range(n):
            if not (vv >> h) & 1ULL:
                continue
            k = table[g, h]
            if k >= 0:
                out |= 1ULL << k
    return int(out)


def line_convolve(const double complex[::1] s, const double complex[::1] t,
                  const cnp.int64_t[::1] left, const cnp.int64_t[::1] right,
                  const cnp.int64_t[::1] target, const double complex[::1] coef,
                  Py_ssize_t n):
    out_arr = np.zeros(n, dtype=complex)
    cdef double complex[::1] out = out_arr
    cdef Py_ssize_t p
    for p in range(left.shape[0]):
        out[target[p]] += coef[p] * s[left[p]] * t[right[p]]
    return out_arr


def subset_join_violation(cnp.int64_t[:, ::1] src_join, cnp.int64_t src_bottom,
                          cnp.int64_t[::1] fmap, cnp.int64_t[:, ::1] tgt_join,
                          cnp.int64_t tgt_bottom):
    cdef Py_ssize_t n = src_join.shape[0]
    cdef Py_ssize_t size = (<Py_ssize_t>1) << n
    js_arr = np.empty(size, dtype=np.int64)
    jt_arr = np.empty(size, dtype=np.int64)
    cdef cnp.int64_t[::1] js = js_arr
    cdef cnp.int64_t[::1] jt = jt_arr
    cdef Py_ssize_t mask, low, rest, i
    cdef cnp.int64_t a, b
    js[0] = src_bottom
    jt[0] = tgt_bottom
    if fmap[src_bottom] != tgt_bottom:
        return 0
    for mask in range(1, size):
        low = mask & -mask
        rest = mask ^ low
        i = 0
        while (low >> i) != 1:
            i += 1
        a = src_join[js[rest], i]
        b = tgt_join[jt[rest], fmap[i]]
        js[mask] = a
        jt[mask] = b
        if fmap[a] != b:
            return mask
    return -1
