"""Row-sketching operators ``S`` of shape ``(c, m)`` with reproducible randomness.

Random kinds draw from ``numpy.random.PCG64`` seeded by
``SeedSequence([seed, kind_code])``, so each ``(seed, kind)`` pair owns a
stable stream.  The exact bit stream is pinned by golden tests in this repo.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dense import as_matrix, norm2
from .errors import DimensionError, InvalidWeights

WITHOUT_REPLACEMENT = "sample_without_replacement"
WITH_REPLACEMENT = "sample_with_replacement"
GAUSSIAN = "gaussian"
USER_SUPPLIED = "user_supplied"

KINDS = (WITHOUT_REPLACEMENT, WITH_REPLACEMENT, GAUSSIAN, USER_SUPPLIED)
_KIND_CODE = {WITHOUT_REPLACEMENT: 1, WITH_REPLACEMENT: 2, GAUSSIAN: 3}
_UINT64_MAX = 2**64 - 1


@dataclass(frozen=True)
class SketchOperator:
    """A ``c x m`` sketching matrix and where it came from.

    ``n`` is the column count of the design matrix this sketch is meant for;
    construction enforces ``n <= c <= m``.
    """

    matrix: np.ndarray
    kind: str
    n: int
    seed: int | None = None
    weights: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        mat = as_matrix(self.matrix, "sketch matrix").copy()
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)
        if self.kind not in KINDS:
            raise ValueError(f"unknown sketch kind {self.kind!r}")
        _check_dims(mat.shape[1], mat.shape[0], self.n)

    @property
    def c(self):
        return self.matrix.shape[0]

    @property
    def m(self):
        return self.matrix.shape[1]

    def describe(self):
        return {"kind": self.kind, "c": self.c, "m": self.m, "n": self.n, "seed": self.seed}


def _check_dims(m, c, n):
    if n < 1:
        raise DimensionError(f"n must be positive, got {n}")
    if c > m:
        raise DimensionError(f"sketch has c={c} rows but m={m} columns; need c <= m")
    if c < n:
        raise DimensionError(f"sketch has c={c} rows but n={n}; need c >= n")


def _check_seed(seed):
    seed = int(seed)
    if not 0 <= seed <= _UINT64_MAX:
        raise ValueError("seed must be a 64-bit unsigned integer")
    return seed


def generator(seed, kind):
    """The generator owning the stream for ``(seed, kind)``."""
    ss = np.random.SeedSequence([_check_seed(seed), _KIND_CODE[kind]])
    return np.random.Generator(np.random.PCG64(ss))


def sample_without_replacement(m, c, n, seed):
    """Select ``c`` distinct rows of an ``m``-row matrix uniformly; ``S @ S.T = I_c``."""
    _check_dims(m, c, n)
    seed = _check_seed(seed)
    rows = generator(seed, WITHOUT_REPLACEMENT).choice(m, size=c, replace=False)
    s = np.zeros((c, m))
    s[np.arange(c), rows] = 1.0
    return SketchOperator(s, WITHOUT_REPLACEMENT, n, seed)


def sample_with_replacement(m, c, n, seed, row_weights=None):
    """Importance sampling with replacement.

    Row ``k`` of ``S`` is ``e_i / sqrt(c * w_i)`` where ``i`` is drawn with
    probability ``w_i``; this scaling gives ``E[S.T @ S] = I_m``.
    """
    _check_dims(m, c, n)
    seed = _check_seed(seed)
    if row_weights is None:
        w = np.full(m, 1.0 / m)
    else:
        w = np.asarray(row_weights, dtype=np.float64)
        if w.shape != (m,):
            raise InvalidWeights(f"need {m} weights, got shape {w.shape}")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise InvalidWeights("weights must be finite and strictly positive")
        if abs(w.sum() - 1.0) > 1e-12:
            raise InvalidWeights(f"weights sum to {w.sum()!r}, not 1")
    rows = generator(seed, WITH_REPLACEMENT).choice(m, size=c, replace=True, p=w)
    s = np.zeros((c, m))
    s[np.arange(c), rows] = 1.0 / np.sqrt(c * w[rows])
    return SketchOperator(s, WITH_REPLACEMENT, n, seed, weights=w)


def gaussian(m, c, n, seed):
    """Dense sketch with i.i.d. N(0, 1/c) entries."""
    _check_dims(m, c, n)
    seed = _check_seed(seed)
    s = generator(seed, GAUSSIAN).standard_normal((c, m)) / np.sqrt(c)
    return SketchOperator(s, GAUSSIAN, n, seed)


def from_matrix(s, n):
    """Wrap an explicit matrix as a user-supplied sketch."""
    return SketchOperator(as_matrix(s, "sketch matrix"), USER_SUPPLIED, n)


def make(kind, m, c, n, seed, row_weights=None):
    """Dispatch on ``kind`` for the random sketch families."""
    if kind == WITHOUT_REPLACEMENT:
        return sample_without_replacement(m, c, n, seed)
    if kind == WITH_REPLACEMENT:
        return sample_with_replacement(m, c, n, seed, row_weights)
    if kind == GAUSSIAN:
        return gaussian(m, c, n, seed)
    raise ValueError(f"cannot generate sketches of kind {kind!r}")


def apply(s, m):
    """Return ``S @ M``."""
    m = as_matrix(m)
    if s.m != m.shape[0]:
        raise DimensionError(f"sketch acts on {s.m} rows, matrix has {m.shape[0]}")
    return s.matrix @ m


def product_scale(s, m):
    """``||S||_2 ||M||_2``, the reference size for rank decisions on ``S M``."""
    return norm2(s.matrix) * norm2(m)


def has_orthonormal_rows(s, tol=1e-12):
    mat = s.matrix if isinstance(s, SketchOperator) else np.asarray(s)
    return float(np.linalg.norm(mat @ mat.T - np.eye(mat.shape[0]))) <= tol
