"""Exact and sketched multivariate multiple linear regression.

The exact problem ``min_X ||A X - B||_(p)`` has the same minimizer
``A^+ B`` for every Schatten order, so :func:`solve_exact` takes no ``p``.
The sketched problem ``min_X ||S (A X - B)||_(p)`` is solved by
``(S A)^+ S B``; loss of rank in ``S A`` is recorded, not raised.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import sketch as _sketch
from .dense import as_matrix, numerical_rank, pinv, schatten_norm, thin_qr
from .errors import DimensionError, RankDeficient


@dataclass(frozen=True)
class MmlrProblem:
    """Design ``a`` (m x n, full column rank) and right-hand sides ``b`` (m x d)."""

    a: np.ndarray
    b: np.ndarray
    rank_tol: float | None = None

    def __post_init__(self):
        a = as_matrix(self.a, "a")
        b = as_matrix(self.b, "b")
        if a.shape[0] != b.shape[0]:
            raise DimensionError(f"a has {a.shape[0]} rows, b has {b.shape[0]}")
        if a.shape[0] < a.shape[1]:
            raise DimensionError(f"a must be tall or square, got {a.shape}")
        r = numerical_rank(a, self.rank_tol)
        if r < a.shape[1]:
            raise RankDeficient(f"a has numerical rank {r} < {a.shape[1]}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def m(self):
        return self.a.shape[0]

    @property
    def n(self):
        return self.a.shape[1]

    @property
    def d(self):
        return self.b.shape[1]


@dataclass(frozen=True)
class MmlrSolution:
    x_hat: np.ndarray
    b_hat: np.ndarray
    r_hat: np.ndarray


@dataclass(frozen=True)
class SketchedSolution:
    x_tilde: np.ndarray
    b_tilde: np.ndarray
    r_tilde: np.ndarray
    rank_preserved: bool
    sketch: _sketch.SketchOperator


def solve_exact(problem):
    """``X_hat = R^{-1} Q^T B`` from a thin QR of ``A``, by back substitution."""
    qr = thin_qr(problem.a, problem.rank_tol)
    x_hat = scipy.linalg.solve_triangular(qr.r, qr.q.T @ problem.b, lower=False)
    b_hat = problem.a @ x_hat
    return MmlrSolution(x_hat, b_hat, problem.b - b_hat)


def solve_sketched(problem, s):
    """``X_tilde = (S A)^+ S B``."""
    if s.m != problem.m:
        raise DimensionError(f"sketch acts on {s.m} rows, problem has {problem.m}")
    sa = _sketch.apply(s, problem.a)
    scale = _sketch.product_scale(s, problem.a)
    x_tilde = pinv(sa, problem.rank_tol, scale) @ _sketch.apply(s, problem.b)
    b_tilde = problem.a @ x_tilde
    preserved = numerical_rank(sa, problem.rank_tol, scale) == problem.n
    return SketchedSolution(x_tilde, b_tilde, problem.b - b_tilde, preserved, s)


def _diff_norm(x, y, p):
    if x.shape != y.shape:
        raise DimensionError(f"shape mismatch {x.shape} vs {y.shape}")
    return schatten_norm(x - y, p)


def solution_error(exact, sk, p):
    """``||X_tilde - X_hat||_(p)``."""
    return _diff_norm(sk.x_tilde, exact.x_hat, p)


def residual_error(exact, sk, p):
    """``||R_tilde - R_hat||_(p)``."""
    return _diff_norm(sk.r_tilde, exact.r_hat, p)


def objective(a, b, x, p, s=None):
    """``||A X - B||_(p)``, or ``||S (A X - B)||_(p)`` when a sketch is given."""
    resid = a @ x - b
    if s is not None:
        resid = _sketch.apply(s, resid)
    return schatten_norm(resid, p)
