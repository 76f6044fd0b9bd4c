"""Normalizers of a sub-*-algebra B, the pseudogroup they generate, and its germs.

For abelian B with minimal projections e_x, a subspace V in the pseudogroup
of B moves the point x to y when e_y V e_x is nonzero. Germs of V at x are
compared through V e_x: in a finite spectrum ``span{e_x}`` is the smallest
idempotent around x, so two subspaces agree near x iff they agree after
multiplying by it.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import (BaseMismatch, InvariantBug, NotAbelian, NotInIpiB, NotNormalizer,
                     NotProjection, SizeLimit)
from .groupoid import FiniteGroupoid, find_isomorphism, from_product, is_effective, pair_like
from .invsgp import PartialBijection
from .maxa import (MaxElement, Spectrum, StarAlgebra, ideals_and_spectrum, is_abelian,
                   is_projection, qleq, qmul, qstar)

MAX_CLOSURE = 512


class SubalgebraContext:
    def __init__(self, algebra: StarAlgebra, b: MaxElement, seed: int = 0):
        if b.algebra is not algebra:
            raise ValueError("B must be an element of the given algebra")
        if not is_projection(b):
            raise NotProjection("B is not a sub-*-algebra")
        self.algebra = algebra
        self.b = b
        self.abelian = is_abelian(b)
        self.spectrum: Spectrum | None = ideals_and_spectrum(b, seed) if self.abelian else None

    @property
    def points(self) -> int:
        self._need_abelian()
        return self.spectrum.size

    def e(self, x: int) -> MaxElement:
        self._need_abelian()
        return self.spectrum.point_element(x)

    def _need_abelian(self):
        if not self.abelian:
            raise NotAbelian("B is not commutative")

    def __repr__(self) -> str:
        return f"SubalgebraContext(dim B={self.b.dim}, abelian={self.abelian})"


def is_normalizer(ctx: SubalgebraContext, n: np.ndarray) -> bool:
    A, B = ctx.algebra, ctx.b
    n = np.asarray(n, dtype=complex)
    ns = A.star(n)
    for b in B.basis:
        if not B.contains(A.mul(A.mul(n, b), ns)) or not B.contains(A.mul(A.mul(ns, b), n)):
            return False
    return True


def sigma_hat(ctx: SubalgebraContext, n: np.ndarray) -> MaxElement:
    """B n B; for abelian B also confirms it equals n B and B n."""
    if not is_normalizer(ctx, n):
        raise NotNormalizer("element does not normalize B")
    B = ctx.b
    v = ctx.algebra.element([n])
    out = qmul(qmul(B, v), B)
    if ctx.abelian and not (qmul(v, B) == out and qmul(B, v) == out):
        raise InvariantBug("BnB differs from nB or Bn for abelian B")
    return out


def in_ipi_B(ctx: SubalgebraContext, v: MaxElement) -> bool:
    B = ctx.b
    vs = qstar(v)
    return (qleq(qmul(vs, v), B) and qleq(qmul(v, vs), B)
            and qleq(qmul(v, B), v) and qleq(qmul(B, v), v))


def spectrum_action(ctx: SubalgebraContext, v: MaxElement, check: bool = True) -> PartialBijection:
    ctx._need_abelian()
    if check and not in_ipi_B(ctx, v):
        raise NotInIpiB("subspace is not in the pseudogroup of B")
    k = ctx.points
    out = [-1] * k
    for x in range(k):
        ve = qmul(v, ctx.e(x))
        if ve.dim == 0:
            continue
        targets = [y for y in range(k) if qmul(ctx.e(y), ve).dim > 0]
        if len(targets) != 1:
            raise InvariantBug(f"point {x} is sent to {targets}")
        out[x] = targets[0]
    return PartialBijection(tuple(out))


# -- normalizer sources ---------------------------------------------------------

def _partial_isometry(A: StarAlgebra, m: np.ndarray) -> np.ndarray | None:
    """Coordinates of the polar part of the matrix m, if it lies in A."""
    u, s, vh = np.linalg.svd(m)
    if s.size == 0 or s[0] < 1e-8:
        return None
    keep = s > 1e-8 * s[0]
    v = u[:, keep] @ vh[keep]
    if not A.contains_matrix(v):
        return None
    return A.from_matrix(v, check=False)


def _corner_isometries(ctx: SubalgebraContext, rng: np.random.Generator) -> dict:
    """For each pair (y, x), a partial isometry from e_x to e_y inside A, if any."""
    A = ctx.algebra
    mats = [A.to_matrix(p) for p in ctx.spectrum.points]
    out = {}
    for y, x in itertools.product(range(ctx.points), repeat=2):
        w = A.to_matrix(rng.standard_normal(A.dim) + 1j * rng.standard_normal(A.dim))
        v = _partial_isometry(A, mats[y] @ w @ mats[x])
        if v is not None:
            out[(y, x)] = v
    return out


def signature_normalizers(ctx: SubalgebraContext, seed: int = 0) -> list[np.ndarray]:
    """One normalizer per partial bijection of the spectrum that A can realize.

    For the diagonal subalgebra of M_n these are the matrices whose pattern
    of nonzero entries is a partial permutation.
    """
    ctx._need_abelian()
    rng = np.random.default_rng(seed)
    iso = _corner_isometries(ctx, rng)
    k = ctx.points
    out = []
    for size in range(k + 1):
        for dom in itertools.combinations(range(k), size):
            for img in itertools.permutations(range(k), size):
                if all((y, x) in iso for x, y in zip(dom, img)):
                    n = sum((iso[(y, x)] for x, y in zip(dom, img)), np.zeros(ctx.algebra.dim, complex))
                    if size and is_normalizer(ctx, n):
                        out.append(n)
    return out


def sample_normalizers(ctx: SubalgebraContext, count: int, seed: int = 0,
                       max_tries: int | None = None) -> list[np.ndarray]:
    """Random normalizers built from partial isometries between spectral corners.

    Each draw picks a random partial bijection of the spectrum, a random
    partial isometry from e_x to e_y for each of its arrows, random
    coefficients, and finally multiplies by a random element of B.
    """
    ctx._need_abelian()
    A, B = ctx.algebra, ctx.b
    rng = np.random.default_rng(seed)
    mats = [A.to_matrix(p) for p in ctx.spectrum.points]
    k = ctx.points
    out: list[np.ndarray] = []
    tries = 0
    limit = max_tries if max_tries is not None else 20 * count + 20
    while len(out) < count and tries < limit:
        tries += 1
        dom = [x for x in range(k) if rng.random() < 0.8]
        if not dom:
            continue
        img = rng.permutation(k)[: len(dom)]
        n = np.zeros(A.dim, dtype=complex)
        ok = True
        for x, y in zip(dom, img):
            w = A.to_matrix(rng.standard_normal(A.dim) + 1j * rng.standard_normal(A.dim))
            v = _partial_isometry(A, mats[y] @ w @ mats[x])
            if v is None:
                ok = False
                break
            n += (rng.standard_normal() + 1j * rng.standard_normal()) * v
        if not ok:
            continue
        b = (rng.standard_normal(B.dim) + 1j * rng.standard_normal(B.dim)) @ B.basis
        n = A.mul(n, b)
        if np.linalg.norm(n) > 1e-6 and is_normalizer(ctx, n):
            out.append(n / np.linalg.norm(n))
    return out


# -- germ groupoids -------------------------------------------------------------

def close_under_products(elements: list[MaxElement], limit: int = MAX_CLOSURE) -> list[MaxElement]:
    """Close under qstar and qmul, deduplicating through a projector fingerprint."""
    out: list[MaxElement] = []
    if not elements:
        return out
    A = elements[0].algebra
    probe = np.random.default_rng(12345).standard_normal((A.dim, A.dim))
    probe = probe + probe.T
    buckets: dict[tuple[int, int], list[int]] = {}

    def add(v: MaxElement) -> None:
        # equal subspaces have equal projectors, so the fingerprint differs
        # only by rounding; look in the neighbouring buckets too
        f = int(np.floor(float(np.real(np.trace(v.space.projector() @ probe))) * 1e4))
        for k in (f - 1, f, f + 1):
            for i in buckets.get((v.dim, k), ()):
                if qleq(v, out[i]):
                    return
        if len(out) >= limit:
            raise SizeLimit(f"closure exceeds {limit} subspaces")
        buckets.setdefault((v.dim, f), []).append(len(out))
        out.append(v)

    for v in elements:
        add(v)
        add(qstar(v))
    done = 0
    while done < len(out):
        # multiply each new element with everything before it, both ways
        i = done
        done += 1
        for j in range(done):
            add(qmul(out[i], out[j]))
            add(qmul(out[j], out[i]))
    return out


@dataclass(eq=False)
class GermGroupoidResult:
    groupoid: FiniteGroupoid
    germ_labels: list[tuple[int, int]]  # (index into generator_set, point) per arrow
    generator_set: list[MaxElement]
    germ_spaces: list[MaxElement] = field(default_factory=list)  # V e_x per arrow
    actions: list[PartialBijection] = field(default_factory=list)


def germ_groupoid_B(ctx: SubalgebraContext, generators: list[MaxElement]) -> GermGroupoidResult:
    """Germ groupoid of the pseudogroup generated by B and the given subspaces."""
    ctx._need_abelian()
    for v in generators:
        if not in_ipi_B(ctx, v):
            raise NotInIpiB("generator is not in the pseudogroup of B")
    elems = close_under_products([ctx.b] + list(generators))
    actions = [spectrum_action(ctx, v, check=False) for v in elems]
    k = ctx.points
    labels: list[tuple[int, int]] = []
    spaces: list[MaxElement] = []
    for i, v in enumerate(elems):
        for x in sorted(actions[i].domain):
            ve = qmul(v, ctx.e(x))
            if not any(lx == x and ve == sp for (_, lx), sp in zip(labels, spaces)):
                labels.append((i, x))
                spaces.append(ve)

    def arrow_of(v: MaxElement, x: int) -> int:
        ve = qmul(v, ctx.e(x))
        for a, ((_, lx), sp) in enumerate(zip(labels, spaces)):
            if lx == x and ve == sp:
                return a
        raise InvariantBug("germ of a product is missing from the closure")

    d = [x for _, x in labels]
    r = [actions[i](x) for i, x in labels]

    def product(g: int, h: int) -> int:
        i, _ = labels[g]
        j, x = labels[h]
        return arrow_of(qmul(elems[i], elems[j]), x)

    names = [f"[V{i},{x}]" for i, x in labels]
    G = from_product(k, d, r, product, names)
    return GermGroupoidResult(G, labels, elems, spaces, actions)


def germ_equal_by_search(ctx: SubalgebraContext, v: MaxElement, w: MaxElement, x: int) -> bool:
    """Definition of germ equality: v f = w f for some ideal f of B containing e_x."""
    k = ctx.points
    for size in range(1, k + 1):
        for S in itertools.combinations(range(k), size):
            if x in S:
                f = ctx.spectrum.ideal(S)
                if qmul(v, f) == qmul(w, f):
                    return True
    return False


def weyl_groupoid(ctx: SubalgebraContext, generators: list[MaxElement]) -> FiniteGroupoid:
    """Germs of the partial bijections induced on the spectrum.

    Germs of partial bijections of a discrete set are just (image, point)
    pairs, so the result is the principal groupoid of the pairs reached by
    the generated action.
    """
    ctx._need_abelian()
    k = ctx.points
    maps = {PartialBijection(tuple(range(k)))}
    for v in generators:
        if not in_ipi_B(ctx, v):
            raise NotInIpiB("generator is not in the pseudogroup of B")
        f = spectrum_action(ctx, v, check=False)
        maps.add(f)
        maps.add(f.inverse())
    frontier = list(maps)
    while frontier:
        new = []
        for f in frontier:
            for g in list(maps):
                for h in (f.after(g), g.after(f)):
                    if h not in maps:
                        maps.add(h)
                        new.append(h)
        frontier = new
    pairs = sorted({(f(x), x) for f in maps for x in f.domain})
    G = pair_like(k, pairs)
    if not is_effective(G):
        raise InvariantBug("Weyl groupoid is not effective")
    return G


# -- comparison with a bundle's base groupoid -------------------------------------

@dataclass(eq=False)
class ComparisonResult:
    arrow_map: list[int]  # arrow g of G -> germ arrow of [p*(g), d(g)]
    injective: bool
    surjective: bool
    homomorphism: bool
    triangle_commutes: bool
    groupoids_isomorphic: bool

    @property
    def is_iso(self) -> bool:
        return self.injective and self.surjective and self.homomorphism and self.groupoids_isomorphic

    # k: O(G_B) -> O(G) pulls germ sets back along the arrow map, so it is
    # onto iff the arrow map is one-to-one, and one-to-one iff it is onto.
    @property
    def k_surjective(self) -> bool:
        return self.injective

    @property
    def k_injective(self) -> bool:
        return self.surjective


def object_points(ctx: SubalgebraContext, p) -> list[int]:
    """Spectrum point of each object: the x with e_x equal to the unit section there."""
    G = p.G
    out = []
    for x in range(G.object_count):
        ux = p.p_star(1 << G.unit[x])
        hits = [y for y in range(ctx.points) if qleq(ctx.e(y), ux) and qleq(ux, ctx.e(y))]
        out.append(hits[0] if len(hits) == 1 else -1)
    return out


def comparison_map(ctx: SubalgebraContext, p, germ_result: GermGroupoidResult) -> ComparisonResult:
    G = p.G
    if not p.p_star(G.units_mask) == ctx.b:
        raise BaseMismatch("p_star(G0) is not B")
    pts = object_points(ctx, p)
    if -1 in pts:
        raise BaseMismatch("objects do not match spectrum points")
    GB = germ_result.groupoid
    spaces, labels = germ_result.germ_spaces, germ_result.germ_labels

    def germ_of(v: MaxElement, x: int) -> int:
        ve = qmul(v, ctx.e(x))
        for a, ((_, lx), sp) in enumerate(zip(labels, spaces)):
            if lx == x and ve == sp:
                return a
        return -1

    arrow_map = [germ_of(p.p_star(1 << g), pts[G.d[g]]) for g in range(G.arrow_count)]
    injective = -1 not in arrow_map and len(set(arrow_map)) == len(arrow_map)
    surjective = set(arrow_map) == set(range(GB.arrow_count))
    hom = injective and all(
        arrow_map[int(G.compose[g, h])] == GB.compose[arrow_map[g], arrow_map[h]]
        for g in range(G.arrow_count) for h in range(G.arrow_count) if G.compose[g, h] >= 0)
    # p* = b* k* on bisections: the join of V e_x over the germs of p*(U) is p*(U)
    from .groupoid import bisections, members
    triangle = True
    for u in bisections(G):
        pu = p.p_star(u)
        rebuilt = ctx.algebra.zero
        for g in members(u):
            a = arrow_map[g]
            if a >= 0:
                rebuilt = rebuilt + spaces[a]
        if not rebuilt == pu:
            triangle = False
            break
    iso = GB.object_count <= 10 and find_isomorphism(G, GB) is not None
    return ComparisonResult(arrow_map, injective, surjective, hom, triangle, iso)
