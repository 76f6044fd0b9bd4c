"""Fell bundles over finite groupoids and their convolution algebras.

Two kinds of bundle are supported: line bundles twisted by a normalized
U(1) 2-cocycle, and trivial bundles with a fixed matrix-algebra fiber.
A section is a flat complex vector of length ``arrows * fiber_dim``;
entry ``g * fiber_dim + i`` is the i-th fiber coordinate over arrow g.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

from . import kernels
from .errors import BundleMismatch, CocycleInvalid, DegenerateRealization
from .groupoid import FiniteGroupoid, members
from .linalg import DEFAULT_TOL, operator_norm
from .maxa import StarAlgebra


@dataclass(frozen=True, eq=False)
class LineTwist:
    cocycle: np.ndarray  # (arrows, arrows); only composable entries are read


@dataclass(frozen=True, eq=False)
class ProductBundle:
    fiber: np.ndarray  # (dim, q, q) basis of a *-closed matrix algebra


def trivial_cocycle(G: FiniteGroupoid) -> np.ndarray:
    return np.ones((G.arrow_count, G.arrow_count), dtype=complex)


def check_cocycle(G: FiniteGroupoid, c: np.ndarray, tol: float = 1e-9) -> None:
    """Raise CocycleInvalid naming the first offending pair or triple."""
    c = np.asarray(c, dtype=complex)
    n = G.arrow_count
    if c.shape != (n, n):
        raise CocycleInvalid(f"cocycle table must be {n}x{n}", ())
    comp = G.compose
    for g in range(n):
        for h in range(n):
            if comp[g, h] >= 0 and abs(abs(c[g, h]) - 1) > tol:
                raise CocycleInvalid(f"|c({g},{h})| != 1", (g, h))
    for g in range(n):
        if abs(c[G.unit[G.r[g]], g] - 1) > tol or abs(c[g, G.unit[G.d[g]]] - 1) > tol:
            raise CocycleInvalid(f"cocycle not normalized at arrow {g}", (g,))
    for g in range(n):
        for h in range(n):
            gh = comp[g, h]
            if gh < 0:
                continue
            for k in range(n):
                hk = comp[h, k]
                if hk < 0:
                    continue
                if abs(c[g, h] * c[gh, k] - c[g, hk] * c[h, k]) > tol:
                    raise CocycleInvalid(f"cocycle identity fails at ({g},{h},{k})", (g, h, k))


class FellBundleSpec:
    def __init__(self, base: FiniteGroupoid, kind: LineTwist | ProductBundle | None = None,
                 tol: float = DEFAULT_TOL):
        self.base = base
        self.kind = kind if kind is not None else LineTwist(trivial_cocycle(base))
        self.tol = tol
        if isinstance(self.kind, LineTwist):
            check_cocycle(base, self.kind.cocycle)
            self.fiber_dim = 1
            self.fiber_size = 1
            self.fiber_algebra = None
        elif isinstance(self.kind, ProductBundle):
            fib = np.asarray(self.kind.fiber, dtype=complex)
            if fib.ndim != 3 or fib.shape[0] == 0:
                raise ValueError("product bundle needs a nonzero fiber")
            self.fiber_algebra = StarAlgebra(fib, tol, "fiber")
            self.fiber_dim = fib.shape[0]
            self.fiber_size = fib.shape[1]
        else:
            raise TypeError("bundle kind must be LineTwist or ProductBundle")
        comp = base.compose
        left, right = np.nonzero(comp >= 0)
        self._left = np.ascontiguousarray(left, dtype=np.int64)
        self._right = np.ascontiguousarray(right, dtype=np.int64)
        self._target = np.ascontiguousarray(comp[left, right], dtype=np.int64)
        if self.is_line:
            c = np.asarray(self.kind.cocycle, dtype=complex)
            self._coef = np.ascontiguousarray(c[left, right])
            inv = np.array(base.inv)
            self._star_factor = np.conj(c[np.arange(base.arrow_count), inv])

    @property
    def is_line(self) -> bool:
        return isinstance(self.kind, LineTwist)

    @property
    def arrow_count(self) -> int:
        return self.base.arrow_count

    @property
    def dim(self) -> int:
        return self.arrow_count * self.fiber_dim

    def coords_of(self, g: int) -> range:
        return range(g * self.fiber_dim, (g + 1) * self.fiber_dim)

    def coordinate_arrows(self) -> np.ndarray:
        return np.repeat(np.arange(self.arrow_count), self.fiber_dim)

    def delta(self, g: int, value=1.0) -> np.ndarray:
        """The section with the given fiber value at g and zero elsewhere."""
        s = np.zeros(self.dim, dtype=complex)
        s[self.coords_of(g)] = value
        return s

    def fiber_matrix(self, coords: np.ndarray) -> np.ndarray:
        if self.is_line:
            return np.asarray(coords, dtype=complex).reshape(1, 1)
        return np.tensordot(coords, self.fiber_algebra.basis, axes=1)

    @cached_property
    def fiber_unit(self) -> np.ndarray | None:
        if self.is_line:
            return np.ones(1, dtype=complex)
        return self.fiber_algebra.unit

    def check(self, s: np.ndarray) -> np.ndarray:
        s = np.asarray(s, dtype=complex)
        if s.shape != (self.dim,):
            raise BundleMismatch(f"section of shape {s.shape}, bundle needs ({self.dim},)")
        return s

    def random_section(self, rng: np.random.Generator, support: int | None = None) -> np.ndarray:
        """Gaussian section, optionally restricted to an arrow bitmask."""
        s = rng.standard_normal(self.dim) + 1j * rng.standard_normal(self.dim)
        if support is not None:
            keep = np.zeros(self.arrow_count, dtype=bool)
            keep[members(support)] = True
            s[~np.repeat(keep, self.fiber_dim)] = 0
        return s

    def __repr__(self) -> str:
        kind = "line" if self.is_line else f"product(fiber dim {self.fiber_dim})"
        return f"FellBundleSpec({self.base!r}, {kind})"


def convolve(bundle: FellBundleSpec, s: np.ndarray, t: np.ndarray) -> np.ndarray:
    s, t = bundle.check(s), bundle.check(t)
    if bundle.is_line:
        return kernels.line_convolve(s, t, bundle._left, bundle._right, bundle._target,
                                     bundle._coef, bundle.arrow_count)
    f = bundle.fiber_dim
    s2, t2 = s.reshape(-1, f), t.reshape(-1, f)
    contrib = np.einsum("pi,pj,ijk->pk", s2[bundle._left], t2[bundle._right],
                        bundle.fiber_algebra.struct)
    out = np.zeros((bundle.arrow_count, f), dtype=complex)
    np.add.at(out, bundle._target, contrib)
    return out.reshape(-1)


def involution(bundle: FellBundleSpec, s: np.ndarray) -> np.ndarray:
    s = bundle.check(s)
    inv = np.array(bundle.base.inv)
    if bundle.is_line:
        return bundle._star_factor * np.conj(s[inv])
    s2 = s.reshape(-1, bundle.fiber_dim)[inv]
    return (np.conj(s2) @ bundle.fiber_algebra.star_map).reshape(-1)


def fiber_norms(bundle: FellBundleSpec, s: np.ndarray) -> np.ndarray:
    s = bundle.check(s)
    if bundle.is_line:
        return np.abs(s)
    f = bundle.fiber_dim
    return np.array([operator_norm(bundle.fiber_matrix(s[g * f:(g + 1) * f]))
                     for g in range(bundle.arrow_count)])


def sup_norm(bundle: FellBundleSpec, s: np.ndarray) -> float:
    return float(fiber_norms(bundle, s).max(initial=0.0))


def i_norm(bundle: FellBundleSpec, s: np.ndarray) -> float:
    """Largest sum of fiber norms over arrows out of one object (or into it)."""
    G = bundle.base
    norms = fiber_norms(bundle, s)
    inv = np.array(G.inv)
    d = np.array(G.d)
    out = 0.0
    for x in range(G.object_count):
        star = d == x
        out = max(out, norms[star].sum(), norms[inv[star]].sum())
    return float(out)


@dataclass(frozen=True, eq=False)
class _RepData:
    arrows: list[int]  # G_x, in a fixed order
    entry_arrow: np.ndarray  # [a, b] -> the arrow g_a * g_b^-1
    entry_coef: np.ndarray  # [a, b] -> cocycle(g_a g_b^-1, g_b)


def _rep_data(bundle: FellBundleSpec, x: int) -> _RepData:
    G = bundle.base
    gx = G.star_of(x)
    m = len(gx)
    ent = np.empty((m, m), dtype=np.int64)
    coef = np.ones((m, m), dtype=complex)
    for a, g in enumerate(gx):
        for b, h in enumerate(gx):
            k = G.mul(g, G.inv[h])
            ent[a, b] = k
            if bundle.is_line:
                coef[a, b] = bundle.kind.cocycle[k, h]
    return _RepData(gx, ent, coef)


def regular_representation(bundle: FellBundleSpec, x: int) -> Callable[[np.ndarray], np.ndarray]:
    """s -> the matrix of xi -> s*xi on sections over the arrows out of x."""
    if not 0 <= x < bundle.base.object_count:
        raise ValueError(f"no object {x}")
    data = _rep_data(bundle, x)

    def rep(s: np.ndarray) -> np.ndarray:
        s = bundle.check(s)
        if bundle.is_line:
            return data.entry_coef * s[data.entry_arrow]
        f, q = bundle.fiber_dim, bundle.fiber_size
        blocks = np.tensordot(s.reshape(-1, f)[data.entry_arrow], bundle.fiber_algebra.basis, axes=1)
        m = len(data.arrows)
        return blocks.transpose(0, 2, 1, 3).reshape(m * q, m * q)

    return rep


def reduced_norm(bundle: FellBundleSpec, s: np.ndarray) -> float:
    return max(operator_norm(regular_representation(bundle, x)(s))
               for x in range(bundle.base.object_count))


def l2_norm(bundle: FellBundleSpec, xi: np.ndarray) -> float:
    """Norm of a vector of the space the regular representation acts on."""
    return float(np.linalg.norm(xi))


@dataclass(eq=False)
class ConvolutionAlgebra:
    bundle: FellBundleSpec
    algebra: StarAlgebra

    def realize(self, s: np.ndarray) -> np.ndarray:
        return self.algebra.to_matrix(self.bundle.check(s))

    @property
    def dim(self) -> int:
        return self.algebra.dim


def _block_diag(blocks: list[np.ndarray]) -> np.ndarray:
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n), dtype=complex)
    i = 0
    for b in blocks:
        k = b.shape[0]
        out[i:i + k, i:i + k] = b
        i += k
    return out


def build_algebra(bundle: FellBundleSpec) -> ConvolutionAlgebra:
    """Realize the sections as block-diagonal matrices, one block per object."""
    reps = [regular_representation(bundle, x) for x in range(bundle.base.object_count)]
    eye = np.eye(bundle.dim, dtype=complex)
    basis = np.array([_block_diag([rep(e) for rep in reps]) for e in eye])
    try:
        alg = StarAlgebra(basis, bundle.tol, f"sections over {bundle.base!r}")
    except ValueError as exc:
        raise DegenerateRealization(str(exc)) from exc
    return ConvolutionAlgebra(bundle, alg)


def restriction_expectation(calg: ConvolutionAlgebra, a: np.ndarray) -> np.ndarray:
    """Keep the components over unit arrows, zero the rest."""
    bundle = calg.bundle
    a = bundle.check(a)
    keep = np.zeros(bundle.arrow_count, dtype=bool)
    keep[list(bundle.base.unit)] = True
    return np.where(np.repeat(keep, bundle.fiber_dim), a, 0)
