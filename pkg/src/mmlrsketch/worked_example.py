"""The 6 x 3 worked example: Q = (e1 e2 e3), Q_perp = (e4 e5 e6) and a 4 x 6 sketch.

:func:`run` recomputes every stated intermediate (S Q, Z, Z Z^T, Z0, Z0 Q),
the subspace splitting of range(S^T), and the projector/angle identity,
and returns one check record per quantity.

Two stated claims do not survive recomputation.  Rows 2 and 4 of ``S`` are
``e2`` and ``e2 + e5``, so ``e5`` lies in range(S^T) ∩ range(Q_perp): the
range-based dimensions are (dim S1, S0, S10, SQ) = (2, 1, 1, 3) rather than
(2, 0, 2, 4), and ``Z`` is not contained in ``SQ``.  The stated subspaces
are exactly what you get by sorting the four rows of ``S`` individually,
which :func:`run` also checks.  The failing checks are reported, not hidden.
"""
from __future__ import annotations

import math
import time

import numpy as np

from . import __version__, geometry
from .dense import FullQr, norm2, numerical_rank, pinv, singular_values
from .sketch import from_matrix

Q = np.eye(6)[:, :3]
Q_PERP = np.eye(6)[:, 3:]
S_T = np.array([
    [1, 0, 0, 0],
    [0, 1, 0, 1],
    [0, 0, 1, 0],
    [0, 0, 0, 0],
    [0, 0, 0, 1],
    [0, 0, 1, 0],
], dtype=float)
S = S_T.T

SQ_STATED = np.array([[1, 0, 0], [0, 1, 0], [0, 0, 1], [0, 1, 0]], dtype=float)
Z_STATED = np.array([
    [1, 0, 0, 0, 0, 0],
    [0, 1, 0, 0, 0.5, 0],
    [0, 0, 1, 0, 0, 1],
])
ZZT_STATED = np.diag([1.0, 1.25, 2.0])
_r5, _r2 = math.sqrt(5), math.sqrt(2)
Z0_STATED = np.array([
    [1, 0, 0, 0, 0, 0],
    [0, 2 * _r5 / 5, 0, 0, _r5 / 5, 0],
    [0, 0, _r2 / 2, 0, 0, _r2 / 2],
])
Z0Q_STATED = np.diag([1.0, 2 * _r5 / 5, _r2 / 2])
T_STATED = np.array([[0, 0, 0], [0, 0.5, 0], [0, 0, 1.0]])
S1_STATED = np.eye(6)[:, :2]
S10_STATED = np.array([[0, 0], [0, 1], [1, 0], [0, 0], [0, 1], [1, 0]], dtype=float)
SQ_SUBSPACE_STATED = S_T
STATED_DIMS = (2, 0, 2, 4)

EXACT_TOL = 1e-12
ANGLE_TOL = 1e-10


def full_qr():
    return FullQr.from_orthogonal(Q, Q_PERP)


def sketch():
    return from_matrix(S, n=3)


def _jsonable(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, tuple):
        return list(x)
    return x


def _check(name, expected, observed, tol, source, note=None):
    exp = np.asarray(expected, dtype=float)
    obs = np.asarray(observed, dtype=float)
    if exp.shape != obs.shape:
        error, passed = math.inf, False
    else:
        error = float(np.max(np.abs(exp - obs))) if exp.size else 0.0
        passed = error <= tol
    rec = {
        "name": name,
        "source": source,
        "expected": _jsonable(expected),
        "observed": _jsonable(observed),
        "max_abs_error": error if math.isfinite(error) else "inf",
        "tol": tol,
        "passed": bool(passed),
    }
    if note:
        rec["note"] = note
    return rec


def _flag(name, passed, observed, source, note=None):
    rec = {"name": name, "source": source, "observed": _jsonable(observed),
           "passed": bool(passed)}
    if note:
        rec["note"] = note
    return rec


def _same_span(u, v):
    """Largest principal angle between two column spans (0 if identical)."""
    a = geometry.SubspaceBasis(geometry.orth(u))
    b = geometry.SubspaceBasis(geometry.orth(v))
    if a.dim != b.dim:
        return math.pi / 2
    if a.dim == 0:
        return 0.0
    return geometry.principal_angles(a, b).largest


def checks():
    """All check records for the worked example."""
    fq = full_qr()
    s = sketch()
    out = []

    sq = s.matrix @ Q
    out.append(_check("SQ", SQ_STATED, sq, EXACT_TOL, "stated"))
    out.append(_check("rank(SQ)", 3, numerical_rank(sq), 0, "stated"))
    out.append(_check("pinv(SQ) @ SQ = I3", np.eye(3), pinv(sq) @ sq, EXACT_TOL, "derived"))

    zc = geometry.z_construction(s, fq)
    out.append(_check("Z = pinv(SQ) S", Z_STATED, zc.z, EXACT_TOL, "stated"))
    out.append(_check("Z Z^T", ZZT_STATED, zc.gram, EXACT_TOL, "stated"))
    out.append(_check("Z Z^T = I + T T^T", np.eye(3) + zc.t @ zc.t.T, zc.gram, EXACT_TOL,
                      "derived"))
    out.append(_check("Z0 = (Z Z^T)^(-1/2) Z", Z0_STATED, zc.z0, EXACT_TOL, "stated"))
    out.append(_check("Z0 Z0^T = I3", np.eye(3), zc.z0 @ zc.z0.T, EXACT_TOL, "derived"))
    out.append(_check("Z0 Q", Z0Q_STATED, zc.z0 @ Q, EXACT_TOL, "stated"))
    out.append(_check("T = pinv(SQ) S Q_perp", T_STATED, geometry.tangent_matrix(fq, s),
                      EXACT_TOL, "stated"))
    out.append(_check("singular values of T", [1.0, 0.5, 0.0], singular_values(zc.t),
                      EXACT_TOL, "derived"))

    zb = geometry.SubspaceBasis(zc.z0.T)
    qb = geometry.SubspaceBasis(Q)
    angles = geometry.principal_angles(zb, qb)
    out.append(_check("cosines of angles(Z, Q)", [_r2 / 2, 2 * _r5 / 5, 1.0], angles.cosines,
                      ANGLE_TOL, "stated"))
    out.append(_check("tangents of angles(Z, Q) = sv(T)", singular_values(zc.t),
                      angles.tangents, ANGLE_TOL, "derived"))
    tan1 = angles.largest_tangent
    out.append(_check("tan theta1(Z, Q)", 1.0, tan1, ANGLE_TOL, "derived"))
    p_a = geometry.orthogonal_projector(Q)
    p_obl = geometry.oblique_projector(Q, s)
    gap = norm2(p_obl - p_a)
    out.append(_check("||P - P_A||_2", 1.0, gap, EXACT_TOL, "derived"))
    out.append(_check("||P - P_A||_2 = tan theta1(Z, Q)", tan1, gap, ANGLE_TOL, "derived"))
    out.append(_check("P idempotent", p_obl, p_obl @ p_obl, EXACT_TOL, "derived"))

    row_s1, row_s0, row_s10 = geometry.classify_sketch_rows(s, fq)
    row_dims = (row_s1.dim, row_s0.dim, row_s10.dim, row_s1.dim + row_s10.dim)
    out.append(_check("row grouping dims (S1, S0, S10, SQ)", STATED_DIMS, row_dims, 0,
                      "stated", "rows of S sorted one by one"))
    out.append(_check("row grouping spans stated S1 and S10",
                      [0.0, 0.0],
                      [_same_span(row_s1.basis, S1_STATED), _same_span(row_s10.basis, S10_STATED)],
                      ANGLE_TOL, "stated"))

    dec = geometry.decompose_sketch_range(s, fq)
    out.append(_check("S1 = range(S^T) ∩ range(Q) spans stated S1", 0.0,
                      _same_span(dec.s1.basis, S1_STATED), ANGLE_TOL, "stated"))
    out.append(_check("subspace dims (S1, S0, S10, SQ)", STATED_DIMS, dec.dims, 0, "stated",
                      "e5 = row4 - row2 lies in range(S^T) ∩ range(Q_perp)"))
    out.append(_check("dim Z", 3, dec.z.dim, 0, "stated"))
    out.append(_flag("dim Z != dim SQ", dec.z.dim != dec.sq.dim,
                     {"dim_z": dec.z.dim, "dim_sq": dec.sq.dim}, "stated",
                     "under rank preservation dim SQ = n"))
    out.append(_check("Z ⊆ SQ (largest angle from Z to SQ)", 0.0, dec.z_containment_angle(),
                      ANGLE_TOL, "stated", "row 2 of Z0 has a component along e5 ∈ S0"))
    return out


def run():
    """Checks plus summary, in the shape written by ``mmlrsketch paper-example``."""
    start = time.perf_counter()
    recs = checks()
    failed = [r["name"] for r in recs if not r["passed"]]
    return {
        "artifact": {"name": "mmlrsketch", "version": __version__},
        "command": "paper-example",
        "checks": recs,
        "summary": {
            "total": len(recs),
            "passed": len(recs) - len(failed),
            "failed": len(failed),
            "failed_checks": failed,
            "all_passed": not failed,
        },
        "timing": {"seconds": time.perf_counter() - start},
    }
