"""Projectors, the tangent matrix ``T = (S Q)^+ S Q_perp``, principal angles,
and the splitting of ``range(S^T)`` relative to ``range(Q)``.

Notation used throughout:

* ``Q``, ``Q_perp`` -- orthonormal bases of ``range(A)`` and its complement,
  carried together in a :class:`~mmlrsketch.dense.FullQr`.
* ``S1 = range(S^T) ∩ range(Q)``, ``S0 = range(S^T) ∩ range(Q_perp)``,
  ``S10`` the orthogonal complement of ``S1 ⊕ S0`` inside ``range(S^T)``,
  and ``SQ = S1 ⊕ S10``.
* ``Z = (S Q)^+ S``; its row space is the subspace whose angles to
  ``range(Q)`` have tangents equal to the singular values of ``T``.

Principal angles are reported in NONINCREASING order, so ``angles[0]`` is a
largest angle.  This is the reverse of the usual ascending convention.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import sketch as _sketch
from .dense import (
    EPS, FullQr, as_matrix, default_rank_tol, norm2, numerical_rank, pinv,
    thin_qr,
)
from .errors import DimensionError, EmptySubspace, RankNotPreserved

DEFAULT_ANGLE_TOL = 1e-8


@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal basis stored as columns; zero columns encode ``{0}``."""

    basis: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=np.float64)
        if b.ndim != 2:
            raise DimensionError(f"basis must be 2-d, got shape {b.shape}")
        object.__setattr__(self, "basis", b)

    @property
    def ambient_dim(self):
        return self.basis.shape[0]

    @property
    def dim(self):
        return self.basis.shape[1]

    def orthonormality_error(self):
        if self.dim == 0:
            return 0.0
        return float(np.linalg.norm(self.basis.T @ self.basis - np.eye(self.dim), 2))

    def projector(self):
        return self.basis @ self.basis.T

    @classmethod
    def span(cls, vectors, rank_tol=None):
        """Orthonormal basis for the column span of ``vectors``."""
        return cls(orth(vectors, rank_tol))


def orth(m, rank_tol=None):
    """Orthonormal basis of ``range(m)`` from the SVD, thresholded like ``numerical_rank``."""
    m = np.asarray(m, dtype=np.float64)
    if m.size == 0:
        return np.zeros((m.shape[0], 0))
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    if s[0] == 0.0:
        return np.zeros((m.shape[0], 0))
    tol = default_rank_tol(m.shape) if rank_tol is None else rank_tol
    return u[:, s > tol * s[0]]


@dataclass(frozen=True)
class PrincipalAngleSet:
    """Angles in ``[0, pi/2]`` sorted nonincreasing, with matching tangents.

    A tangent is ``math.inf`` exactly when its angle is ``pi/2``.
    """

    angles: np.ndarray
    tangents: np.ndarray
    cosines: np.ndarray
    sines: np.ndarray

    @property
    def largest(self):
        return float(self.angles[0])

    @property
    def largest_tangent(self):
        return float(self.tangents[0])


def principal_angles(u, v, zero_tol=None):
    """Principal angles between ``range(u.basis)`` and ``range(v.basis)``.

    Cosines come from the SVD of ``U^T V`` and sines from the SVD of
    ``(I - U U^T) V`` (with ``V`` the smaller basis); each angle is taken
    from whichever of the two is better conditioned.  Cosines at or below
    ``zero_tol`` are snapped to an exact right angle with infinite tangent.
    """
    if u.ambient_dim != v.ambient_dim:
        raise DimensionError(f"ambient dimensions differ: {u.ambient_dim} vs {v.ambient_dim}")
    if u.dim == 0 or v.dim == 0:
        raise EmptySubspace("principal angles need two nontrivial subspaces")
    big, small = (u.basis, v.basis) if u.dim >= v.dim else (v.basis, u.basis)
    k = small.shape[1]
    if zero_tol is None:
        zero_tol = u.ambient_dim * EPS

    cross = big.T @ small
    cos = np.clip(np.linalg.svd(cross, compute_uv=False), 0.0, 1.0)     # descending
    sin = np.clip(np.linalg.svd(small - big @ cross, compute_uv=False), 0.0, 1.0)
    sin = sin[::-1]                                                      # ascending

    angles = np.where(cos * cos >= 0.5, np.arcsin(sin), np.arccos(cos))
    with np.errstate(divide="ignore"):
        tangents = np.where(cos > zero_tol, sin / np.where(cos > 0, cos, 1.0), math.inf)
    right = cos <= zero_tol
    angles[right] = math.pi / 2
    cos = cos.copy()
    cos[right] = 0.0

    order = np.arange(k)[::-1]
    return PrincipalAngleSet(angles[order], tangents[order], cos[order], sin[order])


def orthogonal_projector(a, rank_tol=None):
    """``P_A = A A^+ = Q Q^T``."""
    q = thin_qr(a, rank_tol).q
    return q @ q.T


def oblique_projector(a, s, rank_tol=None):
    """``P = A (S A)^+ S``."""
    a = as_matrix(a, "a")
    return a @ pinv(_sketch.apply(s, a), rank_tol, _sketch.product_scale(s, a)) @ s.matrix


def projector_gap(a, s, rank_tol=None):
    """``||P - P_A||_2`` without forming m x m matrices.

    Uses ``P - P_A = Q (R (S A)^+ S - Q^T)`` with ``A = Q R``.
    """
    a = as_matrix(a, "a")
    qr = thin_qr(a, rank_tol)
    sa_pinv = pinv(_sketch.apply(s, a), rank_tol, _sketch.product_scale(s, a))
    w = qr.r @ sa_pinv @ s.matrix - qr.q.T
    return norm2(w)


def _check_conform(fq, s):
    if s.m != fq.q.shape[0]:
        raise DimensionError(f"sketch acts on {s.m} rows, Q has {fq.q.shape[0]}")


def tangent_matrix(fq, s, rank_tol=None):
    """``T = (S Q)^+ (S Q_perp)``, shape ``n x (m - n)``."""
    _check_conform(fq, s)
    return pinv(s.matrix @ fq.q, rank_tol, norm2(s.matrix)) @ (s.matrix @ fq.q_perp)


def tangent_norm(fq, s, rank_tol=None):
    """``||T||_2``, or ``inf`` when ``S Q`` has lost rank (a right angle to ``range(Q)``)."""
    _check_conform(fq, s)
    n = fq.q.shape[1]
    if numerical_rank(s.matrix @ fq.q, rank_tol, norm2(s.matrix)) < n:
        return math.inf
    t = tangent_matrix(fq, s, rank_tol)
    return norm2(t) if t.size else 0.0


@dataclass(frozen=True)
class ZConstruction:
    z: np.ndarray          # (S Q)^+ S, n x m
    gram: np.ndarray       # Z Z^T = I + T T^T
    z0: np.ndarray         # (Z Z^T)^{-1/2} Z, orthonormal rows
    t: np.ndarray


def z_construction(s, fq, rank_tol=None):
    _check_conform(fq, s)
    sq = s.matrix @ fq.q
    n = sq.shape[1]
    scale = norm2(s.matrix)            # ||Q||_2 = 1
    r = numerical_rank(sq, rank_tol, scale)
    if r < n:
        raise RankNotPreserved(f"rank(S Q) = {r} < n = {n}")
    sq_pinv = pinv(sq, rank_tol, scale)
    z = sq_pinv @ s.matrix
    t = sq_pinv @ (s.matrix @ fq.q_perp)
    gram = z @ z.T
    gram = 0.5 * (gram + gram.T)
    lam, vec = np.linalg.eigh(gram)
    inv_sqrt = (vec / np.sqrt(lam)) @ vec.T
    return ZConstruction(z, gram, inv_sqrt @ z, t)


def z_subspace(s, fq, rank_tol=None):
    """Orthonormal basis ``Z0^T`` of ``range(Z^T)``; needs ``rank(S Q) = n``."""
    return SubspaceBasis(z_construction(s, fq, rank_tol).z0.T)


@dataclass(frozen=True)
class SubspaceDecomposition:
    s: SubspaceBasis
    s1: SubspaceBasis
    s0: SubspaceBasis
    s10: SubspaceBasis
    sq: SubspaceBasis
    z: SubspaceBasis | None
    angle_tol: float

    @property
    def dims(self):
        """``(dim S1, dim S0, dim S10, dim SQ)``."""
        return (self.s1.dim, self.s0.dim, self.s10.dim, self.sq.dim)

    def z_containment_angle(self):
        """Largest angle between a direction of ``Z`` and the subspace ``SQ``.

        Zero (up to rounding) iff ``Z ⊆ SQ``; ``pi/2`` if ``SQ = {0}``.
        """
        if self.z is None:
            raise RankNotPreserved("Z is undefined without rank preservation")
        zb = self.z.basis
        resid = zb - self.sq.basis @ (self.sq.basis.T @ zb)
        sine = min(1.0, float(np.linalg.svd(resid, compute_uv=False)[0]))
        return math.asin(sine)


def _near_null_directions(m, dim, threshold):
    """Orthonormal coordinates ``y`` (columns) with ``||m y|| < threshold``."""
    if m.shape[0] == 0:
        return np.eye(dim)
    _, sv, vt = np.linalg.svd(m, full_matrices=True)
    padded = np.zeros(dim)
    padded[: len(sv)] = sv
    return vt[padded < threshold].T


def _complement(cols, dim):
    if cols.shape[1] == 0:
        return np.eye(dim)
    u, _, _ = np.linalg.svd(cols, full_matrices=True)
    return u[:, cols.shape[1]:]


def decompose_sketch_range(s, fq, angle_tol=DEFAULT_ANGLE_TOL, rank_tol=None):
    """Split ``range(S^T)`` into ``S1``, ``S0``, ``S10`` and ``SQ``.

    Intersections are realized by principal angles: a direction of
    ``range(S^T)`` lies in ``range(Q)`` (resp. ``range(Q_perp)``) when its
    angle to it is below ``angle_tol`` radians.
    """
    _check_conform(fq, s)
    if not 0 < angle_tol < math.pi / 4:
        raise ValueError("angle_tol must lie in (0, pi/4)")
    sb = orth(s.matrix.T, rank_tol)
    dim_s = sb.shape[1]
    thresh = math.sin(angle_tol)
    m = sb.shape[0]

    # sine of the angle to range(Q) is ||Q_perp^T x||; to range(Q_perp) it is ||Q^T x||
    y1 = _near_null_directions(fq.q_perp.T @ sb, dim_s, thresh)
    y0 = _near_null_directions(fq.q.T @ sb, dim_s, thresh)
    y10 = _complement(np.hstack([y1, y0]), dim_s)

    s1 = sb @ y1
    s10 = sb @ y10
    try:
        z = z_subspace(s, fq, rank_tol)
    except RankNotPreserved:
        z = None
    return SubspaceDecomposition(
        s=SubspaceBasis(sb),
        s1=SubspaceBasis(s1.reshape(m, -1)),
        s0=SubspaceBasis((sb @ y0).reshape(m, -1)),
        s10=SubspaceBasis(s10.reshape(m, -1)),
        sq=SubspaceBasis(np.hstack([s1, s10]).reshape(m, -1)),
        z=z,
        angle_tol=angle_tol,
    )


def classify_sketch_rows(s, fq, angle_tol=DEFAULT_ANGLE_TOL):
    """Group the individual rows of ``S`` by where each one points.

    Returns the spans of rows lying in ``range(Q)``, rows lying in
    ``range(Q_perp)``, and the remaining mixed rows.  Unlike
    :func:`decompose_sketch_range` this depends on the particular rows of
    ``S``, not only on ``range(S^T)``; it exists to compare against
    row-by-row groupings of a sketch.
    """
    _check_conform(fq, s)
    thresh = math.sin(angle_tol)
    inside, outside, mixed = [], [], []
    for row in s.matrix:
        norm = np.linalg.norm(row)
        if norm == 0.0:
            continue
        x = row / norm
        if np.linalg.norm(fq.q_perp.T @ x) < thresh:
            inside.append(x)
        elif np.linalg.norm(fq.q.T @ x) < thresh:
            outside.append(x)
        else:
            mixed.append(x)
    m = s.m

    def span(rows):
        return SubspaceBasis(orth(np.array(rows).T) if rows else np.zeros((m, 0)))

    return span(inside), span(outside), span(mixed)
