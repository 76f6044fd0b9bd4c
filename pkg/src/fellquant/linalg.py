"""Subspaces of C^N with a tolerance-governed rank decision.

Orthonormal bases come from LAPACK's SVD; a singular value counts as
nonzero when it exceeds ``tol * max(1, largest)``. The floor of 1 keeps
rounding debris from products of unit vectors (norms ~1e-16) from being
promoted to a direction.
"""
from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch

DEFAULT_TOL = 1e-9


def _orthonormal_range(m: np.ndarray, tol: float) -> np.ndarray:
    if m.shape[1] == 0:
        return np.zeros((m.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    if s.size == 0:
        return np.zeros((m.shape[0], 0), dtype=complex)
    keep = s > tol * max(1.0, float(s[0]))
    return u[:, keep]


class Subspace:
    __slots__ = ("basis", "tol")

    def __init__(self, basis: np.ndarray, tol: float = DEFAULT_TOL):
        # trusted: callers pass orthonormal columns
        self.basis = basis
        self.tol = tol

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def __len__(self) -> int:
        return self.dim

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T

    def project(self, v: np.ndarray) -> np.ndarray:
        return self.basis @ (self.basis.conj().T @ v)

    def __add__(self, other: Subspace) -> Subspace:
        return sum_(self, other)

    def __and__(self, other: Subspace) -> Subspace:
        return intersect(self, other)

    def __le__(self, other: Subspace) -> bool:
        return leq(self, other)

    def __ge__(self, other: Subspace) -> bool:
        return leq(other, self)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.dim == other.dim and leq(self, other)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim})"


def span(vectors, tol: float = DEFAULT_TOL, ambient_dim: int | None = None) -> Subspace:
    """Span of the given vectors (rows of a 2-D array, or an iterable of 1-D arrays)."""
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        m = vectors.T
    else:
        vecs = [np.asarray(v, dtype=complex).ravel() for v in vectors]
        if not vecs:
            if ambient_dim is None:
                raise DimensionMismatch("ambient dimension needed for an empty span")
            return zero(ambient_dim, tol)
        lengths = {v.shape[0] for v in vecs}
        if len(lengths) != 1:
            raise DimensionMismatch(f"vectors have lengths {sorted(lengths)}")
        m = np.stack(vecs, axis=1)
    if ambient_dim is not None and m.shape[0] != ambient_dim:
        raise DimensionMismatch(f"expected length {ambient_dim}, got {m.shape[0]}")
    m = np.asarray(m, dtype=complex)
    if not np.isfinite(m).all():
        raise ValueError("vectors contain NaN or infinity")
    return Subspace(_orthonormal_range(m, tol), tol)


def zero(n: int, tol: float = DEFAULT_TOL) -> Subspace:
    return Subspace(np.zeros((n, 0), dtype=complex), tol)


def full(n: int, tol: float = DEFAULT_TOL) -> Subspace:
    return Subspace(np.eye(n, dtype=complex), tol)


def coordinate_subspace(n: int, coords, tol: float = DEFAULT_TOL) -> Subspace:
    coords = sorted(coords)
    b = np.zeros((n, len(coords)), dtype=complex)
    b[coords, np.arange(len(coords))] = 1
    return Subspace(b, tol)


def _check(v: Subspace, w: Subspace) -> float:
    if v.ambient_dim != w.ambient_dim:
        raise DimensionMismatch(f"ambient dimensions {v.ambient_dim} and {w.ambient_dim}")
    return max(v.tol, w.tol)


def sum_(v: Subspace, w: Subspace) -> Subspace:
    tol = _check(v, w)
    if v.dim == 0:
        return Subspace(w.basis, tol)
    if w.dim == 0:
        return Subspace(v.basis, tol)
    return Subspace(_orthonormal_range(np.hstack([v.basis, w.basis]), tol), tol)


def intersect(v: Subspace, w: Subspace) -> Subspace:
    """Common null space of the two complementary projectors."""
    tol = _check(v, w)
    n = v.ambient_dim
    if v.dim == 0 or w.dim == 0:
        return zero(n, tol)
    eye = np.eye(n)
    stacked = np.vstack([eye - v.projector(), eye - w.projector()])
    _, s, vh = np.linalg.svd(stacked)
    s_full = np.zeros(n)
    s_full[: s.size] = s
    null = vh[s_full <= tol].conj().T
    return Subspace(null, tol)


def contains(v: Subspace, vec: np.ndarray) -> bool:
    vec = np.asarray(vec, dtype=complex).ravel()
    if vec.shape[0] != v.ambient_dim:
        raise DimensionMismatch(f"vector of length {vec.shape[0]} in C^{v.ambient_dim}")
    return residual(v, vec) < v.tol * max(1.0, float(np.linalg.norm(vec)))


def residual(v: Subspace, vec: np.ndarray) -> float:
    vec = np.asarray(vec, dtype=complex).ravel()
    return float(np.linalg.norm(vec - v.project(vec)))


def leq(v: Subspace, w: Subspace) -> bool:
    tol = _check(v, w)
    if v.dim == 0:
        return True
    if v.dim > w.dim:
        return False
    res = v.basis - w.project(v.basis)
    return bool(np.linalg.norm(res, axis=0).max() < tol)


def operator_norm(m: np.ndarray) -> float:
    """Largest singular value."""
    m = np.asarray(m, dtype=complex)
    if not np.isfinite(m).all():
        raise ValueError("matrix contains NaN or infinity")
    if m.size == 0:
        return 0.0
    return float(np.linalg.svd(m, compute_uv=False)[0])
