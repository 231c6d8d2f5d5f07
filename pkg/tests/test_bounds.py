import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mmlrsketch import bounds, geometry, worked_example, sketch
from mmlrsketch.dense import full_qr, norm2, pinv, schatten_norm
from mmlrsketch.errors import NotApplicable
from mmlrsketch.mmlr import MmlrProblem, solve_exact, solve_sketched

ORDERS = [1, 1.5, 2, 3, math.inf]


def solve_pair(a, b, s):
    problem = MmlrProblem(a, b)
    return problem, solve_exact(problem), solve_sketched(problem, s)


def example_problem(d=1):
    b = np.zeros((6, d))
    b[4, 0] = 1.0
    return MmlrProblem(worked_example.Q, b)


# --- report mechanics ---------------------------------------------------------

def test_bound_report_slack_tolerance():
    assert bounds.bound_report("X", 1.0, 1.0).holds
    assert bounds.bound_report("X", 1.0 + 5e-10, 1.0).holds
    assert not bounds.bound_report("X", 1.0 + 2e-9, 1.0).holds
    # tolerance scales with the right-hand side
    assert bounds.bound_report("X", 1e6 + 1e-4, 1e6).holds
    assert bounds.bound_report("X", 5.0, math.inf).holds


def test_identity_report_symbolic_infinity():
    assert bounds.identity_report("X", math.inf, math.inf).holds
    assert not bounds.identity_report("X", 3.0, math.inf).holds
    assert not bounds.identity_report("X", math.inf, 3.0).holds
    assert bounds.identity_report("X", 2.0, 2.0 + 1e-9).holds


def test_report_to_dict_is_strict_json():
    rep = bounds.identity_report("P5.1", math.inf, math.inf, metadata={"gap": math.inf})
    text = json.dumps(rep.to_dict(), allow_nan=False)
    back = json.loads(text)
    assert back["lhs"] == "inf" and back["metadata"]["gap"] == "inf"
    assert back["holds"] is True


# --- general bounds -----------------------------------------------------------

def test_identity_sketch_gives_zero_errors(rng):
    a, b = rng.standard_normal((15, 3)), rng.standard_normal((15, 2))
    problem, exact, sk = solve_pair(a, b, sketch.from_matrix(np.eye(15), 3))
    for rep in bounds.eval_general_bounds(problem, exact, sk, ORDERS):
        assert rep.holds
        assert abs(rep.lhs) <= 1e-12
        assert abs(rep.rhs) <= 1e-12


@pytest.mark.parametrize("kind", [sketch.WITHOUT_REPLACEMENT, sketch.WITH_REPLACEMENT,
                                  sketch.GAUSSIAN])
def test_general_bounds_hold_on_gaussian_instance(rng, kind):
    a, b = rng.standard_normal((200, 10)), rng.standard_normal((200, 5))
    problem, exact, sk = solve_pair(a, b, sketch.make(kind, 200, 60, 10, seed=4))
    reports = bounds.eval_general_bounds(problem, exact, sk, [1, 2, math.inf])
    assert len(reports) == 9
    assert all(r.holds for r in reports)
    assert all(r.applicable for r in reports)


def test_relative_bound_inapplicable_when_b_orthogonal():
    a = np.eye(6)[:, :2]
    b = np.eye(6)[:, [3, 4]]
    problem, exact, sk = solve_pair(a, b, sketch.gaussian(6, 4, 2, seed=0))
    rel = [r for r in bounds.eval_general_bounds(problem, exact, sk, 2)
           if r.proposition_id == "P3.1-relative"]
    assert len(rel) == 1
    assert not rel[0].applicable and rel[0].holds


def test_absolute_bound_matches_dense_formula(rng):
    a, b = rng.standard_normal((30, 4)), rng.standard_normal((30, 3))
    s = sketch.sample_with_replacement(30, 12, 4, seed=8)
    problem, exact, sk = solve_pair(a, b, s)
    gap = norm2(geometry.oblique_projector(a, s) - geometry.orthogonal_projector(a))
    rep = bounds.eval_general_bounds(problem, exact, sk, 1.5)[0]
    expected = norm2(pinv(a)) * gap * schatten_norm(b, 1.5)
    assert rep.rhs == pytest.approx(expected, rel=1e-9)


# --- rank-preserving bound ------------------------------------------------

def test_rank_preserving_bound_zero_for_consistent_system(rng):
    a = rng.standard_normal((40, 5))
    problem, exact, sk = solve_pair(a, a @ rng.standard_normal((5, 2)),
                                    sketch.gaussian(40, 12, 5, seed=3))
    for rep in bounds.eval_rank_preserving_bound(problem, exact, sk, ORDERS):
        assert rep.holds
        assert rep.lhs <= 1e-10 and rep.rhs <= 1e-10


def test_rank_preserving_bound_not_applicable_on_rank_loss(rng):
    a = rng.standard_normal((10, 3))
    s = sketch.from_matrix(np.tile(rng.standard_normal(10), (4, 1)), 3)
    problem, exact, sk = solve_pair(a, rng.standard_normal((10, 1)), s)
    with pytest.raises(NotApplicable):
        bounds.eval_rank_preserving_bound(problem, exact, sk, 2)


def test_rank_preserving_bound_worked_instance():
    problem = example_problem()
    exact, sk = solve_exact(problem), solve_sketched(problem, worked_example.sketch())
    rep = bounds.eval_rank_preserving_bound(problem, exact, sk, 2,
                                            fq=worked_example.full_qr())
    # error 1/2, ||A^+|| = 1, ||T|| = 1, ||R_hat|| = 1
    assert rep.lhs == pytest.approx(0.5, abs=1e-14)
    assert rep.rhs == pytest.approx(1.0, abs=1e-14)
    assert rep.holds


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(ORDERS))
def test_rank_preserving_bound_property(seed, p):
    g = np.random.default_rng(seed)
    m = int(g.integers(6, 60))
    n = int(g.integers(1, m // 2))
    c = int(g.integers(n, m + 1))
    d = int(g.integers(1, 4))
    kind = [sketch.WITHOUT_REPLACEMENT, sketch.WITH_REPLACEMENT, sketch.GAUSSIAN][seed % 3]
    problem, exact, sk = solve_pair(g.standard_normal((m, n)), g.standard_normal((m, d)),
                                    sketch.make(kind, m, c, n, seed))
    for rep in bounds.eval_general_bounds(problem, exact, sk, p):
        assert rep.holds
    if sk.rank_preserved:
        assert bounds.eval_rank_preserving_bound(problem, exact, sk, p).holds


# --- Drineas comparison -------------------------------------------------

def test_drineas_requires_single_rhs(rng):
    a = rng.standard_normal((10, 2))
    problem, exact, sk = solve_pair(a, rng.standard_normal((10, 2)),
                                    sketch.gaussian(10, 5, 2, seed=0))
    with pytest.raises(NotApplicable):
        bounds.eval_drineas_comparison(problem, exact, sk)


def test_drineas_identity_sketch_zero_eps(rng):
    a = rng.standard_normal((12, 3))
    problem, exact, sk = solve_pair(a, rng.standard_normal((12, 1)),
                                    sketch.from_matrix(np.eye(12), 3))
    rep = bounds.eval_drineas_comparison(problem, exact, sk, eps=0.0)
    assert rep.applicable and rep.holds
    assert rep.metadata["condition_rank"] and rep.metadata["condition_orthogonality"]
    assert rep.lhs <= 1e-12 and rep.rhs == 0.0


def test_drineas_default_eps_equals_rank_preserving_rhs(rng):
    a = rng.standard_normal((50, 4))
    problem, exact, sk = solve_pair(a, rng.standard_normal((50, 1)),
                                    sketch.gaussian(50, 15, 4, seed=5))
    rep = bounds.eval_drineas_comparison(problem, exact, sk)
    p41 = bounds.eval_rank_preserving_bound(problem, exact, sk, 2)
    assert rep.rhs == pytest.approx(p41.rhs, rel=1e-12)
    assert rep.rhs == pytest.approx(rep.metadata["rank_preserving_rhs"], rel=1e-12)
    assert rep.applicable and rep.holds


def test_drineas_conditions_fail_while_rank_preserving_bound_holds(rng):
    # badly scaled sketch: ||(SQ)^+|| far above 2**0.25
    a = rng.standard_normal((30, 3))
    s = sketch.from_matrix(1e-3 * sketch.gaussian(30, 10, 3, seed=6).matrix, 3)
    problem, exact, sk = solve_pair(a, rng.standard_normal((30, 1)), s)
    rep = bounds.eval_drineas_comparison(problem, exact, sk, eps=0.01)
    assert not rep.metadata["condition_rank"]
    assert not rep.applicable
    assert bounds.eval_rank_preserving_bound(problem, exact, sk, 2).holds


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_uniform_drineas_eps_dominates_tangent(seed):
    # if the orthogonality condition holds for every residual in range(Q_perp),
    # eps >= 2 ||T||^2 and the Drineas rhs is at least the rank-preserving one
    g = np.random.default_rng(seed)
    m = int(g.integers(8, 50))
    n = int(g.integers(1, m // 3 + 1))
    c = int(g.integers(n + 1, m + 1))
    a = g.standard_normal((m, n))
    s = sketch.gaussian(m, c, n, seed)
    fq = full_qr(a)
    sq_pinv = pinv(s.matrix @ fq.q)
    t_norm = geometry.tangent_norm(fq, s)
    # worst residual direction over range(Q_perp): top right singular vector of T
    t = sq_pinv @ s.matrix @ fq.q_perp
    v = np.linalg.svd(t)[2][0]
    r = fq.q_perp @ v
    eps_uniform = 2 * np.linalg.norm(sq_pinv @ s.matrix @ r) ** 2 / np.linalg.norm(r) ** 2
    assert eps_uniform == pytest.approx(2 * t_norm**2, rel=1e-9)
    problem, exact, sk = solve_pair(a, r[:, None], s)
    rep = bounds.eval_drineas_comparison(problem, exact, sk, eps=eps_uniform)
    assert rep.metadata["condition_orthogonality"]
    assert rep.rhs >= rep.metadata["rank_preserving_rhs"] * (1 - 1e-12)


# --- Lemma 2.1 ----------------------------------------------------------

def test_lemma21_equality_for_rank_one():
    u = np.array([[1.0], [0.0]])
    b = u @ u.T
    rep = bounds.eval_lemma21(b, np.eye(2), u, 2)
    assert rep.lhs == pytest.approx(rep.rhs) and rep.holds


def test_lemma21_list_of_orders(rng):
    b, a, c = rng.standard_normal((3, 4)), rng.standard_normal((4, 5)), rng.standard_normal((5, 2))
    reps = bounds.eval_lemma21(b, a, c, ORDERS)
    assert [str(r.p) for r in reps] == ["1", "1.5", "2", "3", "inf"]
    assert all(r.holds for r in reps)


# --- identity checks ----------------------------------------------------

def test_identity_checks_worked_instance():
    reps = {r.proposition_id: r for r in bounds.eval_identity_checks(
        example_problem(), worked_example.sketch(), fq=worked_example.full_qr())}
    # stated S has non-orthonormal rows
    assert not reps["P5.1"].applicable
    for pid in ("P5.2", "P5.3"):
        assert reps[pid].applicable and reps[pid].holds
        assert reps[pid].rhs == pytest.approx(1.0, abs=1e-10)
    assert reps["P5.3"].lhs == pytest.approx(1.0, abs=1e-12)


def test_identity_checks_sampling_sketch(rng):
    a = rng.standard_normal((20, 3))
    s = sketch.sample_without_replacement(20, 8, 3, seed=2)
    reps = bounds.eval_identity_checks(MmlrProblem(a, rng.standard_normal((20, 1))), s)
    assert [r.proposition_id for r in reps] == ["P5.1", "P5.2", "P5.3"]
    assert all(r.applicable and r.holds for r in reps)


def test_identity_checks_rank_loss():
    a = np.eye(6)[:, :2]
    s = sketch.from_matrix(np.eye(6)[[0, 3, 4]], 2)
    reps = {r.proposition_id: r for r in bounds.eval_identity_checks(
        MmlrProblem(a, np.ones((6, 1))), s)}
    assert reps["P5.1"].lhs == math.inf and reps["P5.1"].rhs == math.inf
    assert reps["P5.1"].holds
    assert not reps["P5.2"].applicable and not reps["P5.3"].applicable


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_projector_identity_agrees_with_tangent_identity(seed):
    g = np.random.default_rng(seed)
    m = int(g.integers(5, 40))
    n = int(g.integers(1, m // 2 + 1))
    c = int(g.integers(n, m + 1))
    a = g.standard_normal((m, n))
    s = sketch.gaussian(m, c, n, seed)
    reps = {r.proposition_id: r for r in bounds.eval_identity_checks(
        MmlrProblem(a, np.ones((m, 1))), s)}
    p52, p53 = reps["P5.2"], reps["P5.3"]
    assert p52.holds and p53.holds
    assert abs(p52.lhs - p53.lhs) <= 1e-8 * max(1.0, p52.rhs)
