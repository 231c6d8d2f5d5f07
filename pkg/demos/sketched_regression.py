"""
Sketched least squares with many right-hand sides
=================================================

Solve ``min ||A X - B||`` exactly and after row sketching, then compare the
observed error with the a-priori bounds.
"""

# %%
# A tall random problem with five right-hand sides and a little noise.
import math

import numpy as np

from mmlrsketch import bounds, sketch
from mmlrsketch.mmlr import MmlrProblem, solution_error, solve_exact, solve_sketched

rng = np.random.default_rng(0)
m, n, d, c = 2000, 20, 5, 200
a = rng.standard_normal((m, n))
b = a @ rng.standard_normal((n, d)) + 0.1 * rng.standard_normal((m, d))
problem = MmlrProblem(a, b)
exact = solve_exact(problem)

# %%
# Each sketch kind keeps ``c`` of the ``m`` rows, in its own way.
for kind in (sketch.WITHOUT_REPLACEMENT, sketch.WITH_REPLACEMENT, sketch.GAUSSIAN):
    s = sketch.make(kind, m, c, n, seed=1)
    sk = solve_sketched(problem, s)
    print(f"\n{kind}: rank preserved = {sk.rank_preserved}")
    for p in (1, 2, math.inf):
        print(f"  p = {p:>3}: ||X_tilde - X_hat|| = {solution_error(exact, sk, p):.3e}")

    # %%
    # The rank-preserving bound uses the residual, so it is small for nearly
    # consistent systems; the general bound uses all of ``B``.
    general = bounds.eval_general_bounds(problem, exact, sk, 2)[0]
    tangent = bounds.eval_rank_preserving_bound(problem, exact, sk, 2)
    print(f"  general bound   {general.rhs:.3e}  (holds: {general.holds})")
    print(f"  tangent bound   {tangent.rhs:.3e}  (holds: {tangent.holds})")
