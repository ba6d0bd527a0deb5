"""
Pseudoinverse basics
====================

A first look at the exact pseudoinverse and at the quantities every
iterative method in this package is measured against.
"""
# %%
# We start from a rank-deficient matrix. ``gen_gaussian_rank_r`` keeps the
# top singular triplets of a Gaussian draw, so the rank is exactly what we ask for.
import numpy as np

from sketchpinv import pinv_exact, residual
from sketchpinv.linalg import penrose_errors, singular_info
from sketchpinv.matrices import gen_gaussian_rank_r

A = gen_gaussian_rank_r(8, 5, 3, seed=0)
info = singular_info(A)
print("singular values:", np.round(info.values, 4))
print("numerical rank :", info.rank)

# %%
# The pseudoinverse satisfies the four Penrose conditions. We print their
# Frobenius violations, which should sit at rounding level.
X = pinv_exact(A)
for name, err in zip(["AXA=A", "XAX=X", "AX sym", "XA sym"], penrose_errors(A, X)):
    print(f"{name:7s} {err:.2e}")

# %%
# All solvers report the residual ``||A X A - A||_F``. It vanishes at the
# pseudoinverse but also at any other generalized inverse, which is why the
# traces can also carry the distance to the exact answer.
print("residual at A^+   :", residual(A, X))
print("residual at A^T/10:", residual(A, A.T / 10))
