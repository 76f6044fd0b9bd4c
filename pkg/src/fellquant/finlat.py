"""Finite sup-lattices, monotone maps between them, and their adjoints."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from . import kernels
from .errors import JoinNotPreserved, MeetNotPreserved, NotMonotone

# lattices with at most this many elements get the all-subsets check
EXHAUSTIVE_ELEMENTS = 20


class FiniteSupLattice:
    """A complete lattice given extensionally by its order relation.

    ``leq[a, b]`` is true iff a <= b. Construction checks the partial-order
    axioms and that binary joins and a bottom exist, which in a finite
    poset is the same as every subset having a join.
    """

    def __init__(self, leq: np.ndarray, labels: Sequence | None = None,
                 join_table: np.ndarray | None = None):
        leq = np.asarray(leq, dtype=bool)
        n = leq.shape[0]
        if leq.shape != (n, n) or n == 0:
            raise ValueError("order relation must be a non-empty square table")
        if join_table is None:
            if not leq.diagonal().all():
                raise ValueError("order is not reflexive")
            if (leq & leq.T & ~np.eye(n, dtype=bool)).any():
                raise ValueError("order is not antisymmetric")
            lf = leq.astype(np.float64)
            if ((lf @ lf > 0) & ~leq).any():
                raise ValueError("order is not transitive")
            join_table = _joins_from_order(leq)
        elif not (leq == (join_table == np.arange(n)[None, :])).all():
            raise ValueError("join table disagrees with the order")
        self.leq = leq
        self.labels = list(labels) if labels is not None else list(range(n))
        self.join_table = np.ascontiguousarray(join_table, dtype=np.int64)
        bottoms = np.flatnonzero(leq.all(axis=1))
        if len(bottoms) != 1:
            raise ValueError("lattice has no bottom element")
        self.bottom = int(bottoms[0])
        self.top = int(np.flatnonzero(leq.all(axis=0))[0])

    @property
    def element_count(self) -> int:
        return self.leq.shape[0]

    def __len__(self) -> int:
        return self.element_count

    def join(self, a: int, b: int) -> int:
        return int(self.join_table[a, b])

    def join_all(self, elements) -> int:
        out = self.bottom
        for x in elements:
            out = int(self.join_table[out, x])
        return out

    @cached_property
    def meet_table(self) -> np.ndarray:
        return np.ascontiguousarray(_joins_from_order(self.leq.T), dtype=np.int64)

    def meet(self, a: int, b: int) -> int:
        return int(self.meet_table[a, b])

    def meet_all(self, elements) -> int:
        out = self.top
        for x in elements:
            out = int(self.meet_table[out, x])
        return out

    @classmethod
    def powerset(cls, k: int) -> FiniteSupLattice:
        """Subsets of a k-element set, encoded as bitmasks 0 .. 2**k - 1."""
        if k > 10:
            raise ValueError("powerset lattices are materialized only up to 10 points")
        idx = np.arange(1 << k, dtype=np.int64)
        join = np.bitwise_or.outer(idx, idx)
        return cls(join == idx[None, :], join_table=join)

    @classmethod
    def chain(cls, n: int) -> FiniteSupLattice:
        idx = np.arange(n)
        return cls(idx[:, None] <= idx[None, :])


def _joins_from_order(leq: np.ndarray) -> np.ndarray:
    n = leq.shape[0]
    lf = leq.astype(np.float64)
    out = np.empty((n, n), dtype=np.int64)
    for a in range(n):
        ub = leq[a][None, :] & leq  # ub[b, x]: a <= x and b <= x
        # x is least among ub[b] iff it lies below every member of ub[b]
        below = ub.astype(np.float64) @ lf.T  # below[b, x] = #{y in ub[b] : x <= y}
        least = ub & (below == ub.sum(axis=1, keepdims=True))
        if not least.any(axis=1).all():
            b = int(np.flatnonzero(~least.any(axis=1))[0])
            raise ValueError(f"elements {a} and {b} have no join")
        out[a] = least.argmax(axis=1)
    return out


@dataclass(frozen=True, eq=False)
class MonotoneMap:
    source: FiniteSupLattice
    target: FiniteSupLattice
    graph: tuple[int, ...]

    def __post_init__(self):
        if len(self.graph) != self.source.element_count:
            raise ValueError(
                f"graph has {len(self.graph)} entries, source has {self.source.element_count}")
        g = np.asarray(self.graph, dtype=np.int64)
        if g.size and (g.min() < 0 or g.max() >= self.target.element_count):
            raise ValueError("graph value outside the target lattice")
        bad = self.source.leq & ~self.target.leq[g[:, None], g[None, :]]
        if bad.any():
            a, b = np.argwhere(bad)[0]
            raise NotMonotone(f"{a} <= {b} but f({a}) is not below f({b})")

    def __call__(self, x: int) -> int:
        return self.graph[x]

    @cached_property
    def array(self) -> np.ndarray:
        return np.asarray(self.graph, dtype=np.int64)


def _subset_from_mask(mask: int) -> list[int]:
    return [i for i in range(mask.bit_length()) if (mask >> i) & 1]


def join_violation(f: MonotoneMap) -> list[int] | None:
    """A subset whose join f fails to preserve, or None."""
    src, tgt = f.source, f.target
    if src.element_count <= EXHAUSTIVE_ELEMENTS:
        mask = kernels.subset_join_violation(src.join_table, src.bottom, f.array,
                                             tgt.join_table, tgt.bottom)
        return None if mask < 0 else _subset_from_mask(mask)
    if f(src.bottom) != tgt.bottom:
        return []
    g = f.array
    bad = g[src.join_table] != tgt.join_table[g[:, None], g[None, :]]
    if bad.any():
        a, b = np.argwhere(bad)[0]
        return [int(a), int(b)]
    return None


def meet_violation(f: MonotoneMap) -> list[int] | None:
    src, tgt = f.source, f.target
    if src.element_count <= EXHAUSTIVE_ELEMENTS:
        mask = kernels.subset_join_violation(src.meet_table, src.top, f.array,
                                             tgt.meet_table, tgt.top)
        return None if mask < 0 else _subset_from_mask(mask)
    if f(src.top) != tgt.top:
        return []
    g = f.array
    bad = g[src.meet_table] != tgt.meet_table[g[:, None], g[None, :]]
    if bad.any():
        a, b = np.argwhere(bad)[0]
        return [int(a), int(b)]
    return None


def is_join_preserving(f: MonotoneMap) -> bool:
    return join_violation(f) is None


def is_meet_preserving(f: MonotoneMap) -> bool:
    return meet_violation(f) is None


def right_adjoint(f: MonotoneMap) -> MonotoneMap:
    """g(y) = join of everything f sends below y."""
    witness = join_violation(f)
    if witness is not None:
        raise JoinNotPreserved(witness)
    src, tgt = f.source, f.target
    below = tgt.leq[f.array]  # below[x, y]: f(x) <= y
    graph = tuple(src.join_all(np.flatnonzero(below[:, y])) for y in range(tgt.element_count))
    return MonotoneMap(tgt, src, graph)


def left_adjoint(f: MonotoneMap) -> MonotoneMap:
    """g(x) = meet of every y with x <= f(y)."""
    witness = meet_violation(f)
    if witness is not None:
        raise MeetNotPreserved(witness)
    src, tgt = f.source, f.target
    above = tgt.leq[:, f.array]  # above[x, y]: x <= f(y)
    graph = tuple(src.meet_all(np.flatnonzero(above[x])) for x in range(tgt.element_count))
    return MonotoneMap(tgt, src, graph)


def is_adjoint_pair(lower: MonotoneMap, upper: MonotoneMap) -> bool:
    """lower(x) <= y iff x <= upper(y), checked on every pair."""
    a = lower.target.leq[lower.array[:, None], np.arange(lower.target.element_count)[None, :]]
    b = lower.source.leq[np.arange(lower.source.element_count)[:, None], upper.array[None, :]]
    return bool((a == b).all())


@dataclass(eq=False)
class FiniteQuantale:
    """A finite involutive quantale: lattice plus multiplication and involution tables."""

    lattice: FiniteSupLattice
    mul: np.ndarray
    star: np.ndarray
    unit: int | None = None

    def __len__(self) -> int:
        return self.lattice.element_count

    def law_violations(self) -> list[str]:
        """Names of the involutive-quantale laws that fail (empty if none)."""
        L, m, s = self.lattice, self.mul, self.star
        n = L.element_count
        out = []
        idx = np.arange(n)
        if (m[m[:, :, None], idx[None, None, :]] != m[idx[:, None, None], m[None, :, :]]).any():
            out.append("associativity")
        J = L.join_table
        # binary join distributivity plus the empty join on each side
        if (m[idx[:, None, None], J[None, :, :]] != J[m[:, :, None], m[:, None, :]]).any():
            out.append("left distributivity")
        if (m[J[:, :, None], idx[None, None, :]] != J[m.T[:, :, None], m.T[:, None, :]].transpose(1, 2, 0)).any():
            out.append("right distributivity")
        if (m[:, L.bottom] != L.bottom).any() or (m[L.bottom, :] != L.bottom).any():
            out.append("bottom absorbs")
        if (s[s] != idx).any():
            out.append("involution")
        if (s[m] != m[s[None, :], s[:, None]]).any():
            out.append("anti-multiplicative")
        if (s[J] != J[s[:, None], s[None, :]]).any():
            out.append("involution preserves joins")
        if self.unit is not None and ((m[self.unit] != idx).any() or (m[:, self.unit] != idx).any()):
            out.append("unit")
        return out
