"""Dense real matrix substrate: QR, SVD, pseudoinverse, rank and Schatten norms.

Matrices are plain ``numpy.ndarray`` objects of dtype float64 and shape
``(rows, cols)``.  :func:`as_matrix` is the single gatekeeper that rejects
anything that is not a finite real 2-d array.

Every rank decision is a threshold decision: a singular value counts as
nonzero when it exceeds ``rank_tol * scale``, where ``scale`` defaults to
``sigma_1``.  The default ``rank_tol`` is ``max(rows, cols) * eps``.  For a
product such as ``S A`` pass ``scale = ||S||_2 ||A||_2``, so that a product
made of rounding noise is not mistaken for a full-rank matrix.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionError, InvalidMatrix, InvalidOrder, RankDeficient

EPS = np.finfo(np.float64).eps

__all__ = [
    "SchattenOrder", "ThinQr", "FullQr", "SvdFactors",
    "as_matrix", "default_rank_tol", "svd", "singular_values", "thin_qr",
    "full_qr", "pinv", "schatten_norm", "norm2", "numerical_rank", "cond2",
]


def as_matrix(m, name="matrix"):
    """Return ``m`` as a finite float64 2-d array, or raise InvalidMatrix."""
    try:
        arr = np.asarray(m, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise InvalidMatrix(f"{name} is not a real array: {exc}") from None
    if arr.ndim != 2:
        raise InvalidMatrix(f"{name} must be 2-d, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidMatrix(f"{name} must have positive dimensions, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidMatrix(f"{name} has non-finite entries")
    return arr


def default_rank_tol(shape):
    return max(shape) * EPS


def _resolve_tol(rank_tol, shape):
    if rank_tol is None:
        return default_rank_tol(shape)
    if rank_tol < 0:
        raise ValueError("rank_tol must be nonnegative")
    return float(rank_tol)


@dataclass(frozen=True)
class SchattenOrder:
    """Schatten norm index ``p`` in ``[1, inf]``.

    ``inf`` is kept as ``math.inf`` and tested with :attr:`is_infinite`, so
    the operator-norm branch never goes through a power.
    """

    value: float

    def __post_init__(self):
        v = float(self.value)
        if math.isnan(v) or v < 1:
            raise InvalidOrder(f"Schatten order must satisfy p >= 1, got {self.value!r}")
        object.__setattr__(self, "value", v)

    @property
    def is_infinite(self):
        return math.isinf(self.value)

    @classmethod
    def coerce(cls, p):
        if isinstance(p, SchattenOrder):
            return p
        if isinstance(p, str):
            text = p.strip().lower()
            if text in ("inf", "infinity", "∞", "oo"):
                return cls(math.inf)
            try:
                return cls(float(text))
            except ValueError:
                raise InvalidOrder(f"cannot parse Schatten order {p!r}") from None
        return cls(p)

    def __str__(self):
        if self.is_infinite:
            return "inf"
        return repr(int(self.value)) if self.value.is_integer() else repr(self.value)

    def to_json(self):
        return str(self)


@dataclass(frozen=True)
class SvdFactors:
    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray

    def reconstruct(self):
        return (self.u * self.sigma) @ self.v.T


@dataclass(frozen=True)
class ThinQr:
    q: np.ndarray
    r: np.ndarray


@dataclass(frozen=True)
class FullQr:
    thin: ThinQr
    q_perp: np.ndarray

    @property
    def q(self):
        return self.thin.q

    @property
    def r(self):
        return self.thin.r

    @property
    def basis(self):
        """The orthogonal matrix ``(Q  Q_perp)``."""
        return np.hstack([self.thin.q, self.q_perp])

    @classmethod
    def from_orthogonal(cls, q, q_perp, r=None):
        """Build from explicit orthonormal bases.  ``r`` defaults to the identity."""
        q = as_matrix(q, "q")
        q_perp = np.asarray(q_perp, dtype=np.float64).reshape(q.shape[0], -1)
        n = q.shape[1]
        if q.shape[0] != n + q_perp.shape[1]:
            raise DimensionError("q and q_perp must together have m columns")
        r = np.eye(n) if r is None else as_matrix(r, "r")
        return cls(ThinQr(q, r), q_perp)


def svd(m):
    """Thin SVD with singular values in nonincreasing order."""
    m = as_matrix(m)
    u, s, vt = np.linalg.svd(m, full_matrices=False)
    return SvdFactors(u, s, vt.T)


def singular_values(m):
    return np.linalg.svd(as_matrix(m), compute_uv=False)


def numerical_rank(m, rank_tol=None, scale=None):
    """Number of singular values above ``rank_tol * scale`` (0 for the zero matrix)."""
    m = as_matrix(m)
    s = np.linalg.svd(m, compute_uv=False)
    if s[0] == 0.0:
        return 0
    ref = s[0] if scale is None else scale
    return int(np.count_nonzero(s > _resolve_tol(rank_tol, m.shape) * ref))


def _require_full_column_rank(a, rank_tol):
    rows, cols = a.shape
    if rows < cols:
        raise DimensionError(f"need rows >= cols, got {a.shape}")
    r = numerical_rank(a, rank_tol)
    if r < cols:
        raise RankDeficient(f"numerical rank {r} < {cols} columns")


def _normalize_signs(q, r):
    d = np.sign(np.diag(r))
    d[d == 0] = 1.0
    q[:, : len(d)] *= d
    r *= d[:, None]
    return q, r


def thin_qr(a, rank_tol=None):
    """Thin QR ``a = q @ r`` with ``diag(r) >= 0``; ``a`` must have full column rank."""
    a = as_matrix(a, "a")
    _require_full_column_rank(a, rank_tol)
    q, r = scipy.linalg.qr(a, mode="economic")
    q, r = _normalize_signs(q, r)
    return ThinQr(q, np.triu(r))


def full_qr(a, rank_tol=None):
    """Full QR; ``q_perp`` is an orthonormal basis of null(a.T)."""
    a = as_matrix(a, "a")
    _require_full_column_rank(a, rank_tol)
    n = a.shape[1]
    qb, rb = scipy.linalg.qr(a, mode="full")
    r = rb[:n].copy()
    qb, r = _normalize_signs(qb, r)
    return FullQr(ThinQr(qb[:, :n], np.triu(r)), qb[:, n:])


def pinv(m, rank_tol=None, scale=None):
    """Moore-Penrose inverse, inverting singular values above ``rank_tol * scale``."""
    m = as_matrix(m)
    u, s, vt = np.linalg.svd(m, full_matrices=False)
    if s[0] == 0.0:
        return np.zeros(m.shape[::-1])
    ref = s[0] if scale is None else scale
    keep = s > _resolve_tol(rank_tol, m.shape) * ref
    return (vt[keep].T / s[keep]) @ u[:, keep].T


def schatten_norm(m, p, rank_tol=None):
    """Schatten p-norm ``(sum_j sigma_j**p) ** (1/p)``; ``sigma_1`` for ``p = inf``.

    Singular values at or below ``rank_tol * sigma_1`` are dropped.
    """
    p = SchattenOrder.coerce(p)
    m = as_matrix(m)
    s = np.linalg.svd(m, compute_uv=False)
    s1 = s[0]
    if s1 == 0.0:
        return 0.0
    if p.is_infinite:
        return float(s1)
    s = s[s > _resolve_tol(rank_tol, m.shape) * s1]
    # scaled to avoid overflow for large p
    return float(s1 * np.sum((s / s1) ** p.value) ** (1.0 / p.value))


def norm2(m):
    """Operator (spectral) norm."""
    return float(np.linalg.svd(as_matrix(m), compute_uv=False)[0])


def cond2(a, rank_tol=None):
    """Two-norm condition number ``sigma_1 / sigma_n`` of a full-column-rank matrix."""
    a = as_matrix(a, "a")
    _require_full_column_rank(a, rank_tol)
    s = np.linalg.svd(a, compute_uv=False)
    return float(s[0] / s[a.shape[1] - 1])
