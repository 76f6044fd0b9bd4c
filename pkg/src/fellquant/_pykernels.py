"""Reference implementations of the hot loops.

``_ckernels.pyx`` mirrors these signatures one for one; ``kernels`` picks
whichever is importable.
"""
from __future__ import annotations

import numpy as np


def assoc_violation(table: np.ndarray) -> tuple[int, int, int] | None:
    """First triple (a, b, c) where (ab)c and a(bc) disagree, else None.

    ``table[a, b] == -1`` marks an undefined product. Only triples where
    both ``ab`` and ``bc`` are defined are examined; for those both
    bracketings must be defined and equal.
    """
    n = table.shape[0]
    for a in range(n):
        row = table[a]
        for b in range(n):
            ab = row[b]
            if ab < 0:
                continue
            for c in range(n):
                bc = table[b, c]
                if bc < 0:
                    continue
                left = table[ab, c]
                right = table[a, bc]
                if left < 0 or right < 0 or left != right:
                    return a, b, c
    return None


def set_product(u: int, v: int, table: np.ndarray) -> int:
    """Bitset of all defined products g*h with g in u and h in v."""
    out = 0
    n = table.shape[0]
    vs = [h for h in range(n) if (v >> h) & 1]
    for g in range(n):
        if not (u >> g) & 1:
            continue
        row = table[g]
        for h in vs:
            k = row[h]
            if k >= 0:
                out |= 1 << int(k)
    return out


def line_convolve(s: np.ndarray, t: np.ndarray, left: np.ndarray, right: np.ndarray,
                  target: np.ndarray, coef: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros(n, dtype=complex)
    np.add.at(out, target, coef * s[left] * t[right])
    return out


def subset_join_violation(src_join: np.ndarray, src_bottom: int, fmap: np.ndarray,
                          tgt_join: np.ndarray, tgt_bottom: int) -> int:
    """Smallest subset mask S with f(join S) != join f(S), or -1.

    Subsets of the source carrier are walked in increasing mask order so the
    join of ``S`` extends the already computed join of ``S`` minus its lowest
    element. Passing meet tables and tops checks meet preservation instead.
    """
    n = src_join.shape[0]
    size = 1 << n
    js = np.empty(size, dtype=np.int64)
    jt = np.empty(size, dtype=np.int64)
    js[0] = src_bottom
    jt[0] = tgt_bottom
    if fmap[src_bottom] != tgt_bottom:
        return 0
    for mask in range(1, size):
        low = mask & -mask
        rest = mask ^ low
        i = low.bit_length() - 1
        a = src_join[js[rest], i]
        b = tgt_join[jt[rest], fmap[i]]
        js[mask] = a
        jt[mask] = b
        if fmap[a] != b:
            return mask
    return -1
