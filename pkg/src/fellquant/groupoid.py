"""Finite groupoids and the quantale of their open (= arbitrary) arrow sets.

Arrow sets are Python ints used as bitsets: bit g is set iff arrow g is in
the set. The product ``g*h`` is defined iff ``d(g) == r(h)``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from . import kernels
from .errors import GroupoidAxiomError, InvalidAction, SizeLimit

MAX_BISECTION_ARROWS = 24
MAX_ISO_OBJECTS = 10


def members(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def mask_of(arrows) -> int:
    out = 0
    for g in arrows:
        out |= 1 << int(g)
    return out


@dataclass(frozen=True, eq=False)
class FiniteGroupoid:
    object_count: int
    d: tuple[int, ...]
    r: tuple[int, ...]
    compose: np.ndarray  # compose[g, h] = g*h, or -1
    inv: tuple[int, ...]
    unit: tuple[int, ...]  # unit arrow of each object
    arrow_names: tuple[str, ...] = field(default=())
    object_names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        n = len(self.d)
        if len(self.r) != n or len(self.inv) != n or self.compose.shape != (n, n):
            raise ValueError("arrow tables have inconsistent lengths")
        if len(self.unit) != self.object_count:
            raise ValueError("need exactly one unit arrow per object")
        object.__setattr__(self, "compose", np.ascontiguousarray(self.compose, dtype=np.int64))
        if not self.arrow_names:
            object.__setattr__(self, "arrow_names", tuple(str(g) for g in range(n)))
        if not self.object_names:
            object.__setattr__(self, "object_names", tuple(str(x) for x in range(self.object_count)))

    @property
    def arrow_count(self) -> int:
        return len(self.d)

    def mul(self, g: int, h: int) -> int:
        k = int(self.compose[g, h])
        if k < 0:
            raise ValueError(f"arrows {g} and {h} are not composable")
        return k

    def is_unit(self, g: int) -> bool:
        return self.unit[self.d[g]] == g

    @cached_property
    def units_mask(self) -> int:
        return mask_of(self.unit)

    @cached_property
    def full_mask(self) -> int:
        return (1 << self.arrow_count) - 1

    def names(self, mask: int) -> list[str]:
        return [self.arrow_names[g] for g in members(mask)]

    def star_of(self, x: int) -> list[int]:
        """Arrows with domain x."""
        return [g for g in range(self.arrow_count) if self.d[g] == x]

    def __repr__(self) -> str:
        return f"FiniteGroupoid(objects={self.object_count}, arrows={self.arrow_count})"


def from_product(object_count: int, d: Sequence[int], r: Sequence[int], product,
                 arrow_names: Sequence[str] = (), object_names: Sequence[str] = ()
                 ) -> FiniteGroupoid:
    """Build a groupoid from a product function on composable pairs.

    Units are the arrows e with d(e) = r(e) = x and e*e = e; inverses are
    read off the product table. The result is validated.
    """
    n = len(d)
    table = np.full((n, n), -1, dtype=np.int64)
    for g in range(n):
        for h in range(n):
            if d[g] == r[h]:
                table[g, h] = product(g, h)
    units = []
    for x in range(object_count):
        cands = [g for g in range(n) if d[g] == x and r[g] == x and table[g, g] == g]
        if len(cands) != 1:
            raise GroupoidAxiomError("units", (x,))
        units.append(cands[0])
    inv = []
    for g in range(n):
        cands = [h for h in range(n) if d[h] == r[g] and r[h] == d[g] and table[g, h] == units[r[g]]]
        if not cands:
            raise GroupoidAxiomError("inverses", (g,))
        inv.append(cands[0])
    G = FiniteGroupoid(object_count, tuple(d), tuple(r), table, tuple(inv), tuple(units),
                       tuple(arrow_names), tuple(object_names))
    validate(G)
    return G


def find_violation(G: FiniteGroupoid) -> tuple[str, tuple] | None:
    """First failing axiom as (family, witness), or None."""
    n, d, r, c, u = G.arrow_count, G.d, G.r, G.compose, G.unit
    if any(not 0 <= x < G.object_count for x in d + r):
        return "structure maps", ()
    for g in range(n):
        for h in range(n):
            k = c[g, h]
            if (k >= 0) != (d[g] == r[h]):
                return "composability", (g, h)
            if k >= 0 and (d[k] != d[h] or r[k] != r[g]):
                return "composability", (g, h)
    for x in range(G.object_count):
        if d[u[x]] != x or r[u[x]] != x:
            return "units", (x,)
    for g in range(n):
        if c[g, u[d[g]]] != g or c[u[r[g]], g] != g:
            return "units", (g,)
    bad = kernels.assoc_violation(c)
    if bad is not None:
        return "associativity", tuple(int(a) for a in bad)
    for g in range(n):
        h = G.inv[g]
        if d[h] != r[g] or r[h] != d[g] or c[h, g] != u[d[g]] or c[g, h] != u[r[g]]:
            return "inverses", (g,)
    return None


def validate(G: FiniteGroupoid) -> None:
    bad = find_violation(G)
    if bad is not None:
        raise GroupoidAxiomError(*bad)


# -- the quantale O(G) ------------------------------------------------------

def oq_mul(G: FiniteGroupoid, u: int, v: int) -> int:
    return kernels.set_product(u, v, G.compose)


def oq_inv(G: FiniteGroupoid, u: int) -> int:
    return mask_of(G.inv[g] for g in members(u))


def oq_unit(G: FiniteGroupoid) -> int:
    return G.units_mask


def is_bisection(G: FiniteGroupoid, u: int) -> bool:
    arrows = members(u)
    return (len({G.d[g] for g in arrows}) == len(arrows)
            and len({G.r[g] for g in arrows}) == len(arrows))


def bisections(G: FiniteGroupoid) -> list[int]:
    """All bisections, in increasing bitmask order."""
    n = G.arrow_count
    if n > MAX_BISECTION_ARROWS:
        raise SizeLimit(f"{n} arrows exceeds the bisection enumeration guard")
    out = []

    def grow(g: int, mask: int, used_d: int, used_r: int):
        if g == n:
            out.append(mask)
            return
        grow(g + 1, mask, used_d, used_r)
        bd, br = 1 << G.d[g], 1 << G.r[g]
        if not used_d & bd and not used_r & br:
            grow(g + 1, mask | (1 << g), used_d | bd, used_r | br)

    grow(0, 0, 0, 0)
    return sorted(out)


def bisection_action(G: FiniteGroupoid, u: int) -> tuple[int, ...]:
    """The partial map x -> r(g) for the arrow g of u with d(g) = x; -1 off the domain."""
    out = [-1] * G.object_count
    for g in members(u):
        out[G.d[g]] = G.r[g]
    return tuple(out)


def bisections_pseudogroup(G: FiniteGroupoid):
    """The inverse semigroup of bisections acting on objects."""
    from .invsgp import FinInvSemigroup, PartialBijection, PseudogroupAction

    bis = bisections(G)
    index = {u: i for i, u in enumerate(bis)}
    m = len(bis)
    table = np.empty((m, m), dtype=np.int64)
    for i, u in enumerate(bis):
        for j, v in enumerate(bis):
            table[i, j] = index[oq_mul(G, u, v)]
    inv = np.array([index[oq_inv(G, u)] for u in bis], dtype=np.int64)
    labels = ["{" + ",".join(G.names(u)) + "}" for u in bis]
    S = FinInvSemigroup(table, inv, labels)
    rho = [PartialBijection(bisection_action(G, u)) for u in bis]
    return PseudogroupAction(S, G.object_count, rho, carriers=bis)


# -- predicates ---------------------------------------------------------------

def isotropy(G: FiniteGroupoid, x: int) -> list[int]:
    return [g for g in range(G.arrow_count) if G.d[g] == x and G.r[g] == x]


def orbits(G: FiniteGroupoid) -> list[list[int]]:
    parent = list(range(G.object_count))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in range(G.arrow_count):
        a, b = find(G.d[g]), find(G.r[g])
        if a != b:
            parent[max(a, b)] = min(a, b)
    groups: dict[int, list[int]] = {}
    for x in range(G.object_count):
        groups.setdefault(find(x), []).append(x)
    return list(groups.values())


def is_principal(G: FiniteGroupoid) -> bool:
    return all(len(isotropy(G, x)) == 1 for x in range(G.object_count))


def is_effective(G: FiniteGroupoid) -> bool:
    """Every bisection acting as the identity on its domain consists of units.

    A bisection acts trivially iff each of its singletons does, so singletons
    suffice.
    """
    return all(G.is_unit(g) for g in range(G.arrow_count) if G.d[g] == G.r[g])


def is_topologically_principal(G: FiniteGroupoid) -> bool:
    # dense subsets of a finite discrete unit space are everything
    return is_principal(G)


# -- constructions ------------------------------------------------------------

def discrete_groupoid(n: int) -> FiniteGroupoid:
    return pair_like(n, [(x, x) for x in range(n)])


def pair_like(n: int, pairs: list[tuple[int, int]]) -> FiniteGroupoid:
    """Principal groupoid on n objects whose arrows are the given (r, d) pairs."""
    index = {p: i for i, p in enumerate(pairs)}
    r = [p[0] for p in pairs]
    d = [p[1] for p in pairs]
    names = [f"{a}<-{b}" for a, b in pairs]
    return from_product(n, d, r, lambda g, h: index[(r[g], d[h])], names)


def pair_groupoid(n: int) -> FiniteGroupoid:
    """All pairs (i <- j); arrow i*n + j has range i and domain j."""
    if n < 1:
        raise ValueError("at least one object required")
    return pair_like(n, [(i, j) for i in range(n) for j in range(n)])


def _check_group(table: np.ndarray) -> int:
    m = table.shape[0]
    if table.shape != (m, m) or m == 0 or table.min() < 0 or table.max() >= m:
        raise ValueError("group table must be square with entries in range")
    ids = [e for e in range(m) if (table[e] == np.arange(m)).all() and (table[:, e] == np.arange(m)).all()]
    if not ids:
        raise ValueError("group table has no identity")
    e = ids[0]
    for a in range(m):
        if not ((table[a] == e) & (table[:, a] == e)).any():
            raise ValueError(f"element {a} has no inverse")
    bad = kernels.assoc_violation(np.ascontiguousarray(table, dtype=np.int64))
    if bad is not None:
        raise ValueError(f"group table not associative at {bad}")
    return e


def group_groupoid(table, names: Sequence[str] = ()) -> FiniteGroupoid:
    t = np.asarray(table, dtype=np.int64)
    _check_group(t)
    m = t.shape[0]
    return from_product(1, [0] * m, [0] * m, lambda g, h: int(t[g, h]),
                        tuple(names) or tuple(str(g) for g in range(m)))


def translation_groupoid(table, action) -> FiniteGroupoid:
    """Arrows (a, x) with d = x, r = a.x; arrow index a*points + x."""
    t = np.asarray(table, dtype=np.int64)
    act = np.asarray(action, dtype=np.int64)
    e = _check_group(t)
    m = t.shape[0]
    if act.ndim != 2 or act.shape[0] != m:
        raise InvalidAction("action table must have one row per group element")
    k = act.shape[1]
    if k == 0:
        raise InvalidAction("at least one object required")
    if act.min() < 0 or act.max() >= k:
        raise InvalidAction("action moves a point outside the set")
    if (act[e] != np.arange(k)).any():
        raise InvalidAction("identity does not act trivially")
    for a in range(m):
        for b in range(m):
            if (act[t[a, b]] != act[a][act[b]]).any():
                raise InvalidAction(f"(ab).x != a.(b.x) for a={a}, b={b}")
    d = [x for a in range(m) for x in range(k)]
    r = [int(act[a, x]) for a in range(m) for x in range(k)]
    names = [f"({a},{x})" for a in range(m) for x in range(k)]

    def product(g, h):
        a, b, x = g // k, h // k, h % k
        return int(t[a, b]) * k + x

    return from_product(k, d, r, product, names)


def cyclic_group(n: int) -> np.ndarray:
    idx = np.arange(n)
    return (idx[:, None] + idx[None, :]) % n


def symmetric_group(k: int) -> tuple[np.ndarray, list[tuple[int, ...]]]:
    """Multiplication table of S_k (p*q = p after q) and the permutations."""
    perms = list(itertools.permutations(range(k)))
    index = {p: i for i, p in enumerate(perms)}
    table = np.array([[index[tuple(p[q[i]] for i in range(k))] for q in perms] for p in perms])
    return table, perms


# -- isomorphism --------------------------------------------------------------

def find_isomorphism(G: FiniteGroupoid, H: FiniteGroupoid) -> list[int] | None:
    """An arrow bijection preserving d, r and composition, or None."""
    if G.object_count > MAX_ISO_OBJECTS or H.object_count > MAX_ISO_OBJECTS:
        raise SizeLimit("isomorphism search is limited to 10 objects")
    n = G.arrow_count
    if n != H.arrow_count or G.object_count != H.object_count:
        return None
    sig_g = sorted(len(isotropy(G, x)) for x in range(G.object_count))
    sig_h = sorted(len(isotropy(H, x)) for x in range(H.object_count))
    if sig_g != sig_h:
        return None
    cg, ch = G.compose, H.compose

    def assign(phi, used, objs, objs_inv, g, h):
        stack = [(g, h)]
        while stack:
            a, b = stack.pop()
            if phi[a] == b:
                continue
            if phi[a] != -1 or used[b] or G.is_unit(a) != H.is_unit(b):
                return False
            for xa, xb in ((G.d[a], H.d[b]), (G.r[a], H.r[b])):
                if objs[xa] == -1 and objs_inv[xb] == -1:
                    objs[xa], objs_inv[xb] = xb, xa
                elif objs[xa] != xb or objs_inv[xb] != xa:
                    return False
            phi[a] = b
            used[b] = True
            stack.append((G.inv[a], H.inv[b]))
            for c in range(n):
                pc = phi[c]
                if pc < 0:
                    continue
                for left, right, pl, pr in ((a, c, b, pc), (c, a, pc, b)):
                    k = cg[left, right]
                    k2 = ch[pl, pr]
                    if (k < 0) != (k2 < 0):
                        return False
                    if k >= 0:
                        stack.append((int(k), int(k2)))
        return True

    def search(phi, used, objs, objs_inv):
        free = [g for g in range(n) if phi[g] < 0]
        if not free:
            return phi
        g = free[0]
        for h in range(n):
            if used[h]:
                continue
            state = (phi[:], used[:], objs[:], objs_inv[:])
            if assign(*state, g, h):
                found = search(*state)
                if found is not None:
                    return found
        return None

    return search([-1] * n, [False] * n, [-1] * G.object_count, [-1] * G.object_count)


def is_isomorphic(G: FiniteGroupoid, H: FiniteGroupoid) -> bool:
    return find_isomorphism(G, H) is not None


def bisection_count_formula(n: int) -> int:
    """Number of partial bijections of an n-set: sum_k C(n,k)^2 k!."""
    return sum(math.comb(n, k) ** 2 * math.factorial(k) for k in range(n + 1))
