"""Evaluate both sides of each perturbation bound and geometric identity.

Bounds (``lhs <= rhs``) hold when ``slack = rhs - lhs >= -slack_tol * max(1, rhs)``.
Identities (``lhs == rhs``) hold when ``|lhs - rhs| <= identity_tol * max(1, rhs)``;
infinite values are compared symbolically.  Reports on instances that violate a
result's hypotheses are kept with ``applicable = False`` so that a batch run
can count them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import geometry
from .dense import (
    SchattenOrder, full_qr, norm2, numerical_rank, pinv, schatten_norm,
    singular_values,
)
from .errors import NotApplicable
from .mmlr import residual_error, solution_error

SLACK_TOL = 1e-9
IDENTITY_TOL = 1e-8
APPLICABILITY_TOL = 1e-10

PROPOSITIONS = (
    "P3.1-abs-solution", "P3.1-abs-residual", "P3.1-relative", "P4.1",
    "P5.1", "P5.2", "P5.3", "L2.1", "Drineas-L1",
)


def _json_number(x):
    if x is None:
        return None
    x = float(x)
    if math.isnan(x):
        return None
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


@dataclass
class BoundReport:
    proposition_id: str
    kind: str                      # "bound" or "identity"
    lhs: float
    rhs: float
    slack: float
    holds: bool
    applicable: bool
    tol: float
    p: SchattenOrder | None = None
    metadata: dict = field(default_factory=dict)

    def to_dict(self):
        meta = {k: (_json_number(v) if isinstance(v, (float, np.floating)) else v)
                for k, v in sorted(self.metadata.items())}
        return {
            "proposition_id": self.proposition_id,
            "kind": self.kind,
            "p": None if self.p is None else str(self.p),
            "lhs": _json_number(self.lhs),
            "rhs": _json_number(self.rhs),
            "slack": _json_number(self.slack),
            "tol": self.tol,
            "holds": bool(self.holds),
            "applicable": bool(self.applicable),
            "metadata": meta,
        }


def bound_report(pid, lhs, rhs, p=None, slack_tol=SLACK_TOL, applicable=True, metadata=None):
    tol = slack_tol * max(1.0, rhs) if math.isfinite(rhs) else slack_tol
    slack = rhs - lhs
    return BoundReport(pid, "bound", float(lhs), float(rhs), float(slack),
                       bool(slack >= -tol), applicable, tol, p, dict(metadata or {}))


def identity_slack(lhs, rhs):
    if math.isinf(lhs) or math.isinf(rhs):
        return 0.0 if lhs == rhs else math.inf
    return abs(lhs - rhs)


def identity_report(pid, lhs, rhs, identity_tol=IDENTITY_TOL, applicable=True, metadata=None):
    tol = identity_tol * max(1.0, rhs) if math.isfinite(rhs) else identity_tol
    slack = identity_slack(lhs, rhs)
    return BoundReport(pid, "identity", float(lhs), float(rhs), float(slack),
                       bool(slack <= tol), applicable, tol, None, dict(metadata or {}))


def instance_metadata(problem, s):
    return {"m": problem.m, "n": problem.n, "d": problem.d, "c": s.c,
            "kind": s.kind, "seed": s.seed}


def _orders(p):
    if isinstance(p, (list, tuple)):
        return [SchattenOrder.coerce(q) for q in p]
    return [SchattenOrder.coerce(p)]


def eval_general_bounds(problem, exact, sketched, p, slack_tol=SLACK_TOL,
                        applicability_tol=APPLICABILITY_TOL):
    """Absolute solution, absolute residual and relative solution bounds.

    These need no assumption on ``S``.  ``p`` may be one order or a list.
    """
    a, b = problem.a, problem.b
    s = sketched.sketch
    sv = singular_values(a)
    norm_a, a_pinv = float(sv[0]), 1.0 / float(sv[-1])
    kappa = norm_a * a_pinv
    gap = geometry.projector_gap(a, s, problem.rank_tol)
    meta = instance_metadata(problem, s)
    meta["projector_gap"] = gap
    meta["rank_preserved"] = sketched.rank_preserved

    atb = np.linalg.norm(a.T @ b)
    atb_nonzero = atb > applicability_tol * np.linalg.norm(a) * np.linalg.norm(b)

    reports = []
    for q in _orders(p):
        nb = schatten_norm(b, q)
        err_x = solution_error(exact, sketched, q)
        err_r = residual_error(exact, sketched, q)
        reports.append(bound_report("P3.1-abs-solution", err_x, a_pinv * gap * nb, q,
                                    slack_tol, metadata=meta))
        reports.append(bound_report("P3.1-abs-residual", err_r, gap * nb, q,
                                    slack_tol, metadata=meta))
        nx = schatten_norm(exact.x_hat, q)
        usable = atb_nonzero and nx >= applicability_tol * a_pinv * nb
        if usable:
            lhs = err_x / nx
            rhs = kappa * gap * nb / (norm_a * nx)
        else:
            lhs = rhs = 0.0
        rep = bound_report("P3.1-relative", lhs, rhs, q, slack_tol, applicable=usable,
                           metadata=meta)
        if not usable:
            rep.holds = True
        reports.append(rep)
    return reports


def eval_rank_preserving_bound(problem, exact, sketched, p, slack_tol=SLACK_TOL, fq=None):
    """``||X_tilde - X_hat||_(p) <= ||A^+||_2 ||T||_2 ||R_hat||_(p)``; needs rank(S A) = n."""
    if not sketched.rank_preserved:
        raise NotApplicable("rank(S A) < n")
    fq = fq or full_qr(problem.a, problem.rank_tol)
    t_norm = geometry.tangent_norm(fq, sketched.sketch, problem.rank_tol)
    a_pinv = 1.0 / float(singular_values(problem.a)[-1])
    meta = instance_metadata(problem, sketched.sketch)
    meta["tangent_norm"] = t_norm
    reports = []
    for q in _orders(p):
        rhs = a_pinv * t_norm * schatten_norm(exact.r_hat, q)
        reports.append(bound_report("P4.1", solution_error(exact, sketched, q), rhs, q,
                                    slack_tol, metadata=meta))
    return reports if isinstance(p, (list, tuple)) else reports[0]


def eval_drineas_comparison(problem, exact, sketched, eps=None, slack_tol=SLACK_TOL, fq=None):
    """Compare against the single right-hand-side, Frobenius-norm lemma.

    Reports bound ``||X_hat - X_tilde||_2 <= ||A^+||_2 sqrt(eps) ||R_hat||_2``
    together with its two side conditions ``||(S Q)^+||_2 <= 2**0.25`` and
    ``||(S Q)^+ S R_hat||_2 <= sqrt(eps / 2) ||R_hat||_2``.  ``eps``
    defaults to ``||T||_2**2``, for which the bound is the rank-preserving
    bound itself and needs neither condition.
    """
    if problem.d != 1:
        raise NotApplicable(f"needs a single right-hand side, got d = {problem.d}")
    s = sketched.sketch
    fq = fq or full_qr(problem.a, problem.rank_tol)
    sq_pinv = pinv(s.matrix @ fq.q, problem.rank_tol, norm2(s.matrix))
    t_norm = geometry.tangent_norm(fq, s, problem.rank_tol)
    a_pinv = 1.0 / float(singular_values(problem.a)[-1])
    r_norm = float(np.linalg.norm(exact.r_hat))

    default_eps = eps is None
    if default_eps:
        eps = t_norm**2
    cond_rank = norm2(sq_pinv) <= 2**0.25
    orth_lhs = float(np.linalg.norm(sq_pinv @ (s.matrix @ exact.r_hat)))
    cond_orth = orth_lhs <= (math.sqrt(eps / 2) + APPLICABILITY_TOL) * r_norm

    lhs = float(np.linalg.norm(exact.x_hat - sketched.x_tilde))
    rhs = a_pinv * math.sqrt(eps) * r_norm if r_norm > 0 else 0.0
    applicable = sketched.rank_preserved and (default_eps or (cond_rank and cond_orth))
    meta = instance_metadata(problem, s)
    meta.update({
        "eps": eps,
        "eps_is_default": default_eps,
        "condition_rank": bool(cond_rank),
        "condition_orthogonality": bool(cond_orth),
        "sq_pinv_norm": norm2(sq_pinv),
        "sqrt_eps_star": t_norm,
        "rank_preserving_rhs": a_pinv * t_norm * r_norm if r_norm > 0 else 0.0,
    })
    return bound_report("Drineas-L1", lhs, rhs, SchattenOrder(2), slack_tol,
                        applicable=applicable, metadata=meta)


def eval_lemma21(b, a, c, p, slack_tol=SLACK_TOL):
    """``||B A C||_(p) <= ||B||_2 ||A||_2 ||C||_(p)``."""
    reports = []
    for q in _orders(p):
        reports.append(bound_report("L2.1", schatten_norm(b @ a @ c, q),
                                    norm2(b) * norm2(a) * schatten_norm(c, q), q, slack_tol))
    return reports if isinstance(p, (list, tuple)) else reports[0]


def eval_identity_checks(problem, s, identity_tol=IDENTITY_TOL, orth_tol=1e-10, fq=None):
    """Tangent and projector-difference identities, each evaluated two ways.

    ``P5.1``: ``||T||_2`` against the largest-angle tangent between
    ``range(S^T)`` and ``range(Q)``; only for sketches with orthonormal rows.
    ``P5.2``: ``||T||_2`` against the largest-angle tangent between ``Z`` and
    ``range(Q)``; all singular values of ``T`` are also matched (metadata
    ``max_elementwise_error``).  ``P5.3``: ``||P - P_A||_2`` against the same
    tangent.  P5.2 and P5.3 need ``rank(S Q) = n``.
    """
    rank_tol = problem.rank_tol
    fq = fq or full_qr(problem.a, rank_tol)
    n = problem.n
    qbasis = geometry.SubspaceBasis(fq.q)
    meta = instance_metadata(problem, s)
    reports = []

    orth_err = float(np.linalg.norm(s.matrix @ s.matrix.T - np.eye(s.c)))
    t_norm = geometry.tangent_norm(fq, s, rank_tol)
    if orth_err <= orth_tol:
        angles = geometry.principal_angles(geometry.SubspaceBasis(s.matrix.T), qbasis)
        reports.append(identity_report("P5.1", t_norm, angles.largest_tangent, identity_tol,
                                       metadata={**meta, "orthonormality_error": orth_err}))
    else:
        reports.append(identity_report("P5.1", 0.0, 0.0, identity_tol, applicable=False,
                                       metadata={**meta, "orthonormality_error": orth_err}))

    preserved = numerical_rank(s.matrix @ fq.q, rank_tol, norm2(s.matrix)) == n
    if preserved:
        zc = geometry.z_construction(s, fq, rank_tol)
        angles = geometry.principal_angles(geometry.SubspaceBasis(zc.z0.T), qbasis)
        tan_z = angles.largest_tangent
        t_sv = np.zeros(n)
        if zc.t.size:
            sv = singular_values(zc.t)
            t_sv[: len(sv)] = sv
        elementwise = float(np.max(np.abs(t_sv - angles.tangents)))
        scale = max(1.0, tan_z)
        p52 = identity_report("P5.2", t_norm, tan_z, identity_tol,
                              metadata={**meta, "max_elementwise_error": elementwise})
        p52.holds = p52.holds and elementwise <= identity_tol * scale
        reports.append(p52)
        gap = geometry.projector_gap(problem.a, s, rank_tol)
        reports.append(identity_report("P5.3", gap, tan_z, identity_tol, metadata=meta))
    else:
        for pid in ("P5.2", "P5.3"):
            reports.append(identity_report(pid, 0.0, 0.0, identity_tol, applicable=False,
                                           metadata=meta))
    return reports
