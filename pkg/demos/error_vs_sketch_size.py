"""
Error as the sketch grows
=========================

The sketched error is governed by ``||T||_2``, the largest tangent between
the sketched subspace and ``range(A)``.  Both shrink as ``c`` grows.
"""

# %%
import numpy as np

from mmlrsketch import geometry, sketch
from mmlrsketch.dense import full_qr
from mmlrsketch.mmlr import MmlrProblem, solution_error, solve_exact, solve_sketched

rng = np.random.default_rng(3)
m, n, d = 400, 10, 3
a = rng.standard_normal((m, n))
b = a @ rng.standard_normal((n, d)) + rng.standard_normal((m, d))
problem = MmlrProblem(a, b)
exact = solve_exact(problem)
fq = full_qr(a)

# %%
# Ten Gaussian sketches per size; report medians.
print(f"{'c':>5} {'median ||T||':>14} {'median error':>14}")
for c in (12, 20, 40, 80, 160, 320):
    tangents, errors = [], []
    for trial in range(10):
        s = sketch.gaussian(m, c, n, seed=1000 * c + trial)
        tangents.append(geometry.tangent_norm(fq, s))
        errors.append(solution_error(exact, solve_sketched(problem, s), 2))
    print(f"{c:>5} {np.median(tangents):>14.4f} {np.median(errors):>14.4e}")
