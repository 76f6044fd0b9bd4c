"""The quantale of subspaces of a finite-dimensional *-algebra of matrices.

Algebra elements are coordinate vectors with respect to a fixed basis of
matrices; a quantale element is a subspace of that coordinate space.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import linalg
from .errors import AlgebraMismatch, NotAbelian, NotProjection, StablyGelfandViolated
from .linalg import DEFAULT_TOL, Subspace

VERIFIED = "verified"
NOT_APPLICABLE = "not-applicable"


class StarAlgebra:
    def __init__(self, basis, tol: float = DEFAULT_TOL, name: str = ""):
        basis = np.asarray(basis, dtype=complex)
        if basis.ndim != 3 or basis.shape[1] != basis.shape[2]:
            raise ValueError("basis must be a stack of square matrices")
        self.basis = basis
        self.tol = tol
        self.name = name
        d, n = basis.shape[0], basis.shape[1]
        vec = basis.reshape(d, n * n).T
        if d and np.linalg.matrix_rank(vec, tol=tol * max(1.0, np.abs(vec).max())) != d:
            raise ValueError("basis matrices are linearly dependent")
        self._pinv = np.linalg.pinv(vec)
        self._vec = vec
        prods = np.einsum("iab,jbc->ijac", basis, basis).reshape(d * d, n * n)
        coords = prods @ self._pinv.T
        if d and np.abs(coords @ vec.T - prods).max() > 1e3 * tol * max(1.0, np.abs(prods).max()):
            raise ValueError("basis span is not closed under multiplication")
        self.struct = coords.reshape(d, d, d)
        adj = basis.conj().transpose(0, 2, 1).reshape(d, n * n)
        star = adj @ self._pinv.T
        if d and np.abs(star @ vec.T - adj).max() > 1e3 * tol * max(1.0, np.abs(adj).max()):
            raise ValueError("basis span is not closed under the adjoint")
        self.star_map = star

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def size(self) -> int:
        return self.basis.shape[1]

    def to_matrix(self, a: np.ndarray) -> np.ndarray:
        return np.tensordot(np.asarray(a, dtype=complex), self.basis, axes=1)

    def from_matrix(self, m: np.ndarray, check: bool = True) -> np.ndarray:
        m = np.asarray(m, dtype=complex)
        a = self._pinv @ m.reshape(-1)
        if check:
            err = np.linalg.norm(self._vec @ a - m.reshape(-1))
            if err > 1e3 * self.tol * max(1.0, np.linalg.norm(m)):
                raise ValueError(f"matrix is not in the algebra (residual {err:.2e})")
        return a

    def contains_matrix(self, m: np.ndarray) -> bool:
        a = self._pinv @ np.asarray(m, dtype=complex).reshape(-1)
        return np.linalg.norm(self._vec @ a - m.reshape(-1)) < self.tol * max(1.0, np.linalg.norm(m))

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return np.einsum("i,j,ijk->k", a, b, self.struct)

    def star(self, a: np.ndarray) -> np.ndarray:
        return np.conj(a) @ self.star_map

    def left_mul_matrix(self, a: np.ndarray) -> np.ndarray:
        """L with x @ L = a*x for coordinate row vectors x."""
        return np.einsum("i,ijk->jk", a, self.struct)

    def right_mul_matrix(self, b: np.ndarray) -> np.ndarray:
        """R with x @ R = x*b."""
        return np.einsum("j,ijk->ik", b, self.struct)

    def element(self, vectors) -> MaxElement:
        return MaxElement(self, linalg.span(list(vectors), self.tol, self.dim))

    def element_of_matrices(self, mats) -> MaxElement:
        return self.element([self.from_matrix(m) for m in mats])

    @cached_property
    def whole(self) -> MaxElement:
        return MaxElement(self, linalg.full(self.dim, self.tol))

    @cached_property
    def zero(self) -> MaxElement:
        return MaxElement(self, linalg.zero(self.dim, self.tol))

    @cached_property
    def unit(self) -> np.ndarray | None:
        """Coordinates of the multiplicative unit, if the algebra has one."""
        d = self.dim
        # solve sum_i u_i C[i, j, :] = e_j for all j
        lhs = self.struct.transpose(1, 2, 0).reshape(d * d, d)
        rhs = np.eye(d).reshape(-1)
        u, *_ = np.linalg.lstsq(lhs, rhs, rcond=None)
        if np.abs(lhs @ u - rhs).max() > 1e-8:
            return None
        return u

    @classmethod
    def full_matrix(cls, n: int, tol: float = DEFAULT_TOL) -> StarAlgebra:
        """M_n with the matrix units E_ij as basis (row-major)."""
        basis = np.zeros((n * n, n, n), dtype=complex)
        for i in range(n):
            for j in range(n):
                basis[i * n + j, i, j] = 1
        return cls(basis, tol, f"M{n}")

    @classmethod
    def from_matrices(cls, mats, tol: float = DEFAULT_TOL, name: str = "") -> StarAlgebra:
        """The algebra spanned by the given matrices (not closed up; validated)."""
        mats = np.asarray(mats, dtype=complex)
        n = mats.shape[1]
        sp = linalg.span(mats.reshape(mats.shape[0], n * n), tol)
        return cls(sp.basis.T.reshape(sp.dim, n, n), tol, name)

    def __repr__(self) -> str:
        return f"StarAlgebra({self.name or 'dim=' + str(self.dim)}, N={self.size})"


class MaxElement:
    """A subspace of an algebra, with the quantale operations as operators."""

    __slots__ = ("algebra", "space")

    def __init__(self, algebra: StarAlgebra, space: Subspace):
        if space.ambient_dim != algebra.dim:
            raise AlgebraMismatch("subspace does not live in this algebra")
        self.algebra = algebra
        self.space = space

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def basis(self) -> np.ndarray:
        """Basis vectors as rows."""
        return self.space.basis.T

    def matrices(self) -> np.ndarray:
        return np.tensordot(self.basis, self.algebra.basis, axes=1)

    def __mul__(self, other: MaxElement) -> MaxElement:
        return qmul(self, other)

    def __add__(self, other: MaxElement) -> MaxElement:
        return qjoin(self, other)

    def __and__(self, other: MaxElement) -> MaxElement:
        return qmeet(self, other)

    def __le__(self, other: MaxElement) -> bool:
        return qleq(self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MaxElement):
            return NotImplemented
        _same(self, other)
        return self.space == other.space

    __hash__ = None  # type: ignore[assignment]

    @property
    def star(self) -> MaxElement:
        return qstar(self)

    def contains(self, a: np.ndarray) -> bool:
        return linalg.contains(self.space, a)

    def __repr__(self) -> str:
        return f"MaxElement(dim={self.dim} in {self.algebra!r})"


def _same(v: MaxElement, w: MaxElement) -> StarAlgebra:
    if v.algebra is not w.algebra:
        raise AlgebraMismatch("elements belong to different algebras")
    return v.algebra


def qmul(v: MaxElement, w: MaxElement) -> MaxElement:
    A = _same(v, w)
    tol = max(v.space.tol, w.space.tol)
    if v.dim == 0 or w.dim == 0:
        return MaxElement(A, linalg.zero(A.dim, tol))
    prods = np.einsum("ia,jb,abk->ijk", v.basis, w.basis, A.struct).reshape(-1, A.dim)
    return MaxElement(A, linalg.span(prods, tol))


def qstar(v: MaxElement) -> MaxElement:
    A = v.algebra
    if v.dim == 0:
        return v
    return MaxElement(A, linalg.span(np.conj(v.basis) @ A.star_map, v.space.tol))


def qjoin(v: MaxElement, w: MaxElement) -> MaxElement:
    return MaxElement(_same(v, w), linalg.sum_(v.space, w.space))


def qmeet(v: MaxElement, w: MaxElement) -> MaxElement:
    return MaxElement(_same(v, w), linalg.intersect(v.space, w.space))


def qleq(v: MaxElement, w: MaxElement) -> bool:
    _same(v, w)
    return linalg.leq(v.space, w.space)


def is_projection(b: MaxElement) -> bool:
    return qmul(b, b) == b and qstar(b) == b


def is_abelian(b: MaxElement) -> bool:
    A = b.algebra
    vs = b.basis
    for x, y in itertools.combinations_with_replacement(range(len(vs)), 2):
        if np.linalg.norm(A.mul(vs[x], vs[y]) - A.mul(vs[y], vs[x])) > 1e2 * b.space.tol:
            return False
    return True


def stably_gelfand_check(v: MaxElement) -> str:
    """Return VERIFIED if v v* v <= v (and then equality holds), else NOT_APPLICABLE."""
    w = qmul(qmul(v, qstar(v)), v)
    if not qleq(w, v):
        return NOT_APPLICABLE
    if not qleq(v, w):
        raise StablyGelfandViolated(f"v v* v is strictly below v (dims {w.dim} < {v.dim})")
    return VERIFIED


def is_two_sided_below(b: MaxElement, v: MaxElement) -> bool:
    """v <= b, v b <= v and b v <= v."""
    return qleq(v, b) and qleq(qmul(v, b), v) and qleq(qmul(b, v), v)


@dataclass(eq=False)
class Spectrum:
    """Minimal projections of an abelian sub-*-algebra B, one per point."""

    b: MaxElement
    points: list[np.ndarray]  # coordinates of e_x in the ambient algebra
    _ideals: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.points)

    def point_element(self, x: int) -> MaxElement:
        return self.ideal([x])

    def ideal(self, subset) -> MaxElement:
        key = frozenset(subset)
        if key not in self._ideals:
            A = self.b.algebra
            vecs = [self.points[x] for x in sorted(key)]
            self._ideals[key] = A.element(vecs) if vecs else A.zero
        return self._ideals[key]

    def ideal_lattice(self) -> list[tuple[frozenset[int], MaxElement]]:
        pts = range(self.size)
        return [(frozenset(S), self.ideal(S))
                for k in range(self.size + 1) for S in itertools.combinations(pts, k)]


def ideals_and_spectrum(b: MaxElement, seed: int = 0, max_draws: int = 20,
                        gap: float = 1e-6) -> Spectrum:
    """Diagonalize a random self-adjoint element of b.

    Its distinct nonzero eigenvalues label the points; the spectral
    projections are the minimal projections of b. Near-degenerate draws
    (eigenvalues closer than ``gap``, or a point with eigenvalue near 0) are
    redrawn.
    """
    if not is_projection(b):
        raise NotProjection("B is not a sub-*-algebra")
    if not is_abelian(b):
        raise NotAbelian("B is not commutative")
    A = b.algebra
    k = b.dim
    if k == 0:
        return Spectrum(b, [])
    herm = []
    for v in b.basis:
        vs = A.star(v)
        herm.extend([(v + vs) / 2, (v - vs) / 2j])
    herm = np.array(herm)
    rng = np.random.default_rng(seed)
    for _ in range(max_draws):
        h = rng.standard_normal(len(herm)) @ herm
        hm = A.to_matrix(h)
        hm = (hm + hm.conj().T) / 2
        vals, vecs = np.linalg.eigh(hm)
        clusters: list[list[int]] = []
        for i in np.argsort(vals):
            if clusters and abs(vals[i] - vals[clusters[-1][-1]]) < gap:
                clusters[-1].append(i)
            else:
                clusters.append([i])
        projections = []
        for c in clusters:
            lam = vals[c].mean()
            if abs(lam) < gap:
                continue
            u = vecs[:, c]
            projections.append(u @ u.conj().T)
        if len(projections) != k:
            continue
        try:
            pts = [A.from_matrix(p) for p in projections]
        except ValueError:
            continue
        if not all(b.contains(p) for p in pts):
            continue
        order = sorted(range(k), key=lambda x: (int(np.argmax(np.abs(pts[x]) > 0.5 * np.abs(pts[x]).max())), x))
        return Spectrum(b, [pts[x] for x in order])
    raise ValueError("could not find a generic element with separated spectrum")
