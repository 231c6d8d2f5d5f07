"""
Angles behind a 6 x 3 sketch
============================

A small sketch where every quantity can be checked by hand: the tangent
matrix ``T``, the subspace ``Z`` and the gap between the oblique and the
orthogonal projector.
"""

# %%
import numpy as np

from mmlrsketch import geometry, worked_example
from mmlrsketch.geometry import SubspaceBasis

np.set_printoptions(precision=4, suppress=True)
fq = worked_example.full_qr()
s = worked_example.sketch()
print("S =\n", s.matrix)

# %%
# ``S Q`` keeps rank 3, so ``Z = (S Q)^+ S`` is defined.
zc = geometry.z_construction(s, fq)
print("Z =\n", zc.z)
print("Z Z^T =\n", zc.gram)
print("T =\n", zc.t)

# %%
# The singular values of ``T`` are the tangents of the angles between
# ``range(Z^T)`` and ``range(Q)``; the largest one is also ``||P - P_A||_2``.
angles = geometry.principal_angles(SubspaceBasis(zc.z0.T), SubspaceBasis(fq.q))
print("tangents       ", angles.tangents)
print("||P - P_A||_2  ", geometry.projector_gap(fq.q, s))

# %%
# Splitting ``range(S^T)`` by principal angles.  The sketch rows e2 and
# e2 + e5 combine to e5, which is orthogonal to ``range(Q)``; that is why
# ``S0`` is not empty here.
dec = geometry.decompose_sketch_range(s, fq)
print("dims (S1, S0, S10, SQ) =", dec.dims)
print("angle of Z outside SQ  =", dec.z_containment_angle())
