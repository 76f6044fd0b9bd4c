"""Finite inverse semigroups, partial bijections, germs and the L_cc completion."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from . import kernels
from .errors import InvalidAction, InvalidSemigroup, NotCompatible, NotComplete, SizeLimit
from .finlat import FiniteQuantale, FiniteSupLattice
from .groupoid import FiniteGroupoid, from_product

MAX_SIM_POINTS = 6
MAX_TABLE_ELEMENTS = 2000
MAX_LCC_ELEMENTS = 12


@dataclass(frozen=True)
class PartialBijection:
    """``mapping[x]`` is the image of x, or -1 when x is outside the domain."""

    mapping: tuple[int, ...]

    def __post_init__(self):
        img = [y for y in self.mapping if y >= 0]
        if len(set(img)) != len(img):
            raise ValueError("partial bijection is not injective")
        if any(y >= len(self.mapping) for y in img):
            raise ValueError("image point outside the ground set")

    @property
    def ground_set_size(self) -> int:
        return len(self.mapping)

    @property
    def domain(self) -> frozenset[int]:
        return frozenset(x for x, y in enumerate(self.mapping) if y >= 0)

    def __call__(self, x: int) -> int:
        return self.mapping[x]

    def after(self, other: PartialBijection) -> PartialBijection:
        """self o other: apply ``other`` first."""
        return PartialBijection(tuple(-1 if y < 0 else self.mapping[y] for y in other.mapping))

    def inverse(self) -> PartialBijection:
        out = [-1] * len(self.mapping)
        for x, y in enumerate(self.mapping):
            if y >= 0:
                out[y] = x
        return PartialBijection(tuple(out))

    def is_identity_on_domain(self) -> bool:
        return all(y < 0 or y == x for x, y in enumerate(self.mapping))


class FinInvSemigroup:
    """Inverse semigroup on 0..n-1 given by a multiplication table.

    ``product`` may replace the table for carriers too large to tabulate;
    such semigroups are trusted rather than validated.
    """

    def __init__(self, table: np.ndarray | None, inv: Sequence[int] | None = None,
                 labels: Sequence[str] | None = None, *, size: int | None = None,
                 product=None, validate: bool = True):
        if table is None:
            if product is None or size is None or inv is None:
                raise ValueError("a table, or size + product + inverses, is required")
            self._table = None
            self._product = product
            self.element_count = size
        else:
            self._table = np.ascontiguousarray(table, dtype=np.int64)
            self._product = None
            self.element_count = self._table.shape[0]
            if self._table.shape != (self.element_count, self.element_count):
                raise InvalidSemigroup("multiplication table must be square")
        if inv is None:
            inv = self._find_inverses()
        self.inv = np.asarray(inv, dtype=np.int64)
        self.labels = list(labels) if labels is not None else [str(i) for i in range(self.element_count)]
        if validate and self._table is not None:
            self._validate()

    def mul(self, s: int, t: int) -> int:
        if self._table is not None:
            return int(self._table[s, t])
        return self._product(s, t)

    @property
    def table(self) -> np.ndarray:
        if self._table is None:
            if self.element_count > MAX_TABLE_ELEMENTS:
                raise SizeLimit(f"{self.element_count} elements is too many to tabulate")
            n = self.element_count
            self._table = np.array([[self._product(s, t) for t in range(n)] for s in range(n)],
                                   dtype=np.int64)
        return self._table

    def _find_inverses(self) -> list[int]:
        t = self.table
        out = []
        for s in range(self.element_count):
            cands = [u for u in range(self.element_count) if t[t[s, u], s] == s and t[t[u, s], u] == u]
            if len(cands) != 1:
                raise InvalidSemigroup(f"element {s} has {len(cands)} inverses")
            out.append(cands[0])
        return out

    def _validate(self):
        t = self._table
        n = self.element_count
        if t.min() < 0 or t.max() >= n:
            raise InvalidSemigroup("table entry out of range")
        bad = kernels.assoc_violation(t)
        if bad is not None:
            raise InvalidSemigroup(f"not associative at {bad}")
        for s in range(n):
            u = self.inv[s]
            if t[t[s, u], s] != s or t[t[u, s], u] != u:
                raise InvalidSemigroup(f"inv({s}) is not an inverse")
        E = self.idempotents
        for e, f in itertools.combinations(E, 2):
            if t[e, f] != t[f, e]:
                raise InvalidSemigroup(f"idempotents {e} and {f} do not commute")

    @cached_property
    def idempotents(self) -> list[int]:
        return [s for s in range(self.element_count) if self.mul(s, s) == s]

    def is_idempotent(self, s: int) -> bool:
        return self.mul(s, s) == s

    def __len__(self) -> int:
        return self.element_count

    def __repr__(self) -> str:
        return f"FinInvSemigroup({self.element_count} elements)"


@dataclass(eq=False)
class PseudogroupAction:
    semigroup: FinInvSemigroup
    ground_set_size: int
    rho: list[PartialBijection]
    carriers: list | None = None  # optional concrete objects behind each element

    def __post_init__(self):
        if len(self.rho) != self.semigroup.element_count:
            raise InvalidAction("need one partial bijection per element")


def validate_action(action: PseudogroupAction) -> None:
    S, rho = action.semigroup, action.rho
    n = S.element_count
    for s in range(n):
        if rho[s].ground_set_size != action.ground_set_size:
            raise InvalidAction(f"rho({s}) acts on the wrong set")
        if rho[S.inv[s]] != rho[s].inverse():
            raise InvalidAction(f"rho(inv {s}) != rho({s})^-1")
        if S.is_idempotent(s) and not rho[s].is_identity_on_domain():
            raise InvalidAction(f"idempotent {s} does not act as an identity")
    if n <= MAX_TABLE_ELEMENTS:
        for s in range(n):
            for t in range(n):
                if rho[S.mul(s, t)] != rho[s].after(rho[t]):
                    raise InvalidAction(f"rho({s}*{t}) != rho({s}) o rho({t})")


# -- the symmetric inverse monoid ---------------------------------------------

def partial_bijections(n: int) -> list[tuple[int, ...]]:
    out = []
    for k in range(n + 1):
        for dom in itertools.combinations(range(n), k):
            for img in itertools.permutations(range(n), k):
                m = [-1] * n
                for x, y in zip(dom, img):
                    m[x] = y
                out.append(tuple(m))
    return out


def symmetric_inverse_monoid(n: int) -> tuple[FinInvSemigroup, PseudogroupAction]:
    """I(X) for X = {0..n-1}, with multiplication s*t = s o t."""
    if n > MAX_SIM_POINTS:
        raise SizeLimit(f"I(X) is only built for |X| <= {MAX_SIM_POINTS}")
    maps = partial_bijections(n)
    m = len(maps)
    # encode each map in base n+1, writing "undefined" as the digit n
    arr = np.array([[y if y >= 0 else n for y in mp] + [n] for mp in maps], dtype=np.int64)
    weights = (n + 1) ** np.arange(n, dtype=np.int64)
    lookup = np.full((n + 1) ** n, -1, dtype=np.int64)
    lookup[arr[:, :n] @ weights] = np.arange(m)
    inv_arr = np.full((m, n), n, dtype=np.int64)
    for i in range(m):
        for x in range(n):
            if arr[i, x] < n:
                inv_arr[i, arr[i, x]] = x
    inv = lookup[inv_arr @ weights]
    labels = [_map_label(mp) for mp in maps]

    def product(s: int, t: int) -> int:
        return int(lookup[arr[s][arr[t, :n]] @ weights])

    if m <= MAX_TABLE_ELEMENTS:
        table = np.empty((m, m), dtype=np.int64)
        for s in range(m):
            table[s] = lookup[arr[s][arr[:, :n]] @ weights]
        S = FinInvSemigroup(table, inv, labels, validate=False)
    else:
        S = FinInvSemigroup(None, inv, labels, size=m, product=product)
    action = PseudogroupAction(S, n, [PartialBijection(m) for m in maps])
    return S, action


def _map_label(m: tuple[int, ...]) -> str:
    return "{" + ",".join(f"{x}>{y}" for x, y in enumerate(m) if y >= 0) + "}"


# -- order and compatibility ----------------------------------------------------

def natural_order(S: FinInvSemigroup, s: int, t: int) -> bool:
    """s <= t iff s = f t for some idempotent f."""
    return any(S.mul(f, t) == s for f in S.idempotents)


def compatible(S: FinInvSemigroup, s: int, t: int) -> bool:
    return S.is_idempotent(S.mul(s, int(S.inv[t]))) and S.is_idempotent(S.mul(int(S.inv[s]), t))


def order_matrix(S: FinInvSemigroup) -> np.ndarray:
    """leq[s, t] for every pair; cached on the semigroup."""
    cache = getattr(S, "_order_cache", None)
    if cache is None:
        n = S.element_count
        cache = np.zeros((n, n), dtype=bool)
        for t in range(n):
            for f in S.idempotents:
                cache[S.mul(f, t), t] = True
        S._order_cache = cache
    return cache


def join_of_compatible(S: FinInvSemigroup, subset) -> int | None:
    """Least upper bound of a pairwise compatible subset, or None if S lacks it."""
    subset = list(subset)
    for s, t in itertools.combinations(subset, 2):
        if not compatible(S, s, t):
            raise NotCompatible((s, t))
    leq = order_matrix(S)
    upper = [u for u in range(S.element_count) if all(leq[x, u] for x in subset)]
    least = [u for u in upper if all(leq[u, v] for v in upper)]
    return least[0] if least else None


def compatible_subsets(S: FinInvSemigroup):
    """Every pairwise compatible subset (including the empty one)."""
    n = S.element_count
    comp = [[compatible(S, s, t) for t in range(n)] for s in range(n)]

    def grow(start, chosen):
        yield list(chosen)
        for s in range(start, n):
            if all(comp[s][c] for c in chosen):
                chosen.append(s)
                yield from grow(s + 1, chosen)
                chosen.pop()

    yield from grow(0, [])


def completeness_witness(S: FinInvSemigroup) -> list[int] | None:
    """A compatible subset without a join, or None when S is complete."""
    for X in compatible_subsets(S):
        if join_of_compatible(S, X) is None:
            return X
    return None


def distributivity_witness(S: FinInvSemigroup) -> tuple[int, list[int]] | None:
    """(s, X) with s * join(X) != join(s X), or None."""
    for X in compatible_subsets(S):
        j = join_of_compatible(S, X)
        if j is None:
            continue
        for s in range(S.element_count):
            if join_of_compatible(S, [S.mul(s, x) for x in X]) != S.mul(s, j):
                return s, X
    return None


# -- germs ----------------------------------------------------------------------

def germ_groupoid(action: PseudogroupAction) -> tuple[FiniteGroupoid, list[tuple[int, int]]]:
    """Germs of the action, with one (element, point) representative per arrow.

    (s, x) and (t, x) are the same germ iff s f = t f for an idempotent f
    whose domain contains x. The idempotents around x are closed under
    products, so the smallest one, f_x, works whenever any does and the
    germ of (s, x) is determined by s f_x.
    """
    S, rho = action.semigroup, action.rho
    X = action.ground_set_size
    smallest = []
    for x in range(X):
        around = [f for f in S.idempotents if rho[f](x) >= 0]
        if not around:
            raise InvalidAction(f"point {x} lies in no idempotent's domain")
        f = around[0]
        for e in around[1:]:
            f = S.mul(f, e)
        smallest.append(f)
    key_to_arrow: dict[tuple[int, int], int] = {}
    reps: list[tuple[int, int]] = []
    for s in range(S.element_count):
        for x in rho[s].domain:
            key = (S.mul(s, smallest[x]), x)
            if key not in key_to_arrow:
                key_to_arrow[key] = len(reps)
                reps.append((s, x))
    d = [x for _, x in reps]
    r = [rho[s](x) for s, x in reps]

    def product(g, h):
        s, y = reps[g]
        t, x = reps[h]
        return key_to_arrow[(S.mul(S.mul(s, t), smallest[x]), x)]

    names = [f"[{S.labels[s]},{x}]" for s, x in reps]
    G = from_product(X, d, r, product, names)
    return G, reps


def germ_equivalent_by_search(action: PseudogroupAction, s: int, t: int, x: int) -> bool:
    """The germ relation straight from the definition (used as an oracle)."""
    S, rho = action.semigroup, action.rho
    return any(rho[f](x) >= 0 and S.mul(s, f) == S.mul(t, f) for f in S.idempotents)


# -- L_cc ---------------------------------------------------------------------

def lcc(S: FinInvSemigroup) -> tuple[FiniteQuantale, list[int]]:
    """Downsets closed under joins of compatible subsets, as a quantale.

    Returns the quantale and, per element, the bitmask of S it stands for.
    The empty compatible set counts, so every element contains the bottom
    of S.
    """
    n = S.element_count
    if n > MAX_LCC_ELEMENTS:
        raise SizeLimit(f"lcc is limited to {MAX_LCC_ELEMENTS} elements")
    w = completeness_witness(S)
    if w is not None:
        raise NotComplete(f"compatible subset {w} has no join", w)
    w2 = distributivity_witness(S)
    if w2 is not None:
        raise NotComplete(f"multiplication by {w2[0]} does not distribute over {w2[1]}", w2)
    leq = order_matrix(S)
    below = [sum(1 << s for s in range(n) if leq[s, t]) for t in range(n)]
    comp_subsets = list(compatible_subsets(S))
    joins = [(sum(1 << x for x in X), join_of_compatible(S, X)) for X in comp_subsets]

    def is_closed(mask: int) -> bool:
        for t in range(n):
            if (mask >> t) & 1 and below[t] & ~mask:
                return False
        return all((mask & xm) != xm or (mask >> j) & 1 for xm, j in joins)

    carrier = [mask for mask in range(1 << n) if is_closed(mask)]
    index = {m: i for i, m in enumerate(carrier)}

    def closure(mask: int) -> int:
        while True:
            grown = mask
            for t in range(n):
                if (mask >> t) & 1:
                    grown |= below[t]
            for xm, j in joins:
                if grown & xm == xm:
                    grown |= 1 << j
            if grown == mask:
                return mask
            mask = grown

    k = len(carrier)
    leq_l = np.array([[a & b == a for b in carrier] for a in carrier])
    join_t = np.array([[index[closure(a | b)] for b in carrier] for a in carrier], dtype=np.int64)
    mul = np.empty((k, k), dtype=np.int64)
    for i, a in enumerate(carrier):
        for j, b in enumerate(carrier):
            prod = 0
            for s in _bits(a):
                for t in _bits(b):
                    prod |= 1 << S.mul(s, t)
            mul[i, j] = index[closure(prod)]
    star = np.array([index[sum(1 << int(S.inv[s]) for s in _bits(a))] for a in carrier], dtype=np.int64)
    labels = ["{" + ",".join(S.labels[s] for s in _bits(a)) + "}" for a in carrier]
    unit_mask = closure(sum(1 << e for e in S.idempotents))
    Q = FiniteQuantale(FiniteSupLattice(leq_l, labels, join_t), mul, star,
                       index.get(unit_mask) if _is_unit(mul, index.get(unit_mask)) else None)
    _check_universal_arrow(S, Q, carrier, index, below, closure, comp_subsets)
    return Q, carrier


def _is_unit(mul: np.ndarray, e: int | None) -> bool:
    if e is None:
        return False
    idx = np.arange(mul.shape[0])
    return bool((mul[e] == idx).all() and (mul[:, e] == idx).all())


def _bits(mask: int) -> list[int]:
    return [i for i in range(mask.bit_length()) if (mask >> i) & 1]


def _check_universal_arrow(S, Q, carrier, index, below, closure, comp_subsets):
    """s -> downset(s) is multiplicative and sends compatible joins to joins."""
    down = [index[closure(below[s])] for s in range(S.element_count)]
    for s in range(S.element_count):
        for t in range(S.element_count):
            if Q.mul[down[s], down[t]] != down[S.mul(s, t)]:
                raise AssertionError(f"down-set map not multiplicative at {s},{t}")
    for X in comp_subsets:
        j = join_of_compatible(S, X)
        if Q.lattice.join_all(down[x] for x in X) != down[j]:
            raise AssertionError(f"down-set map does not preserve the join of {X}")


def germ_sets(action: PseudogroupAction, reps: list[tuple[int, int]]) -> list[int]:
    """For each element s, the bitmask of germ arrows [s, x]."""
    S, rho = action.semigroup, action.rho
    out = []
    for s in range(S.element_count):
        mask = 0
        for x in rho[s].domain:
            for a, (t, y) in enumerate(reps):
                if y == x and germ_equivalent_by_search(action, s, t, x):
                    mask |= 1 << a
                    break
        out.append(mask)
    return out
