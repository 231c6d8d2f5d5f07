"""Exact and row-sketched multivariate multiple linear regression in Schatten p-norms.

Submodules:

``dense``      QR, SVD, pseudoinverse, numerical rank, Schatten norms
``sketch``     sampling and Gaussian sketching operators
``mmlr``       exact and sketched solvers
``geometry``   projectors, tangent matrix, principal angles, subspace splitting
``bounds``     two-sided evaluation of perturbation bounds and identities
``matrixio``   Matrix Market / CSV matrix files
``verify``     seeded batch verification driving the ``verify`` command
"""

__version__ = "0.1.0"

from .dense import (  # noqa: E402
    FullQr, SchattenOrder, SvdFactors, ThinQr, cond2, full_qr, numerical_rank,
    pinv, schatten_norm, svd, thin_qr,
)
from .errors import (  # noqa: E402
    ConfigError, DimensionError, EmptySubspace, InvalidOrder, InvalidWeights,
    NotApplicable, ParseError, RankDeficient, RankNotPreserved,
)
from .mmlr import (  # noqa: E402
    MmlrProblem, MmlrSolution, SketchedSolution, residual_error, solution_error,
    solve_exact, solve_sketched,
)
from .sketch import SketchOperator  # noqa: E402
