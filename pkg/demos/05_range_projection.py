"""
Projecting onto the range
=========================

A close relative of SATAX learns ``A A^+``, the orthogonal projector onto
``Range(A)``, from a zero start.
"""
# %%
import numpy as np

from sketchpinv import SolverConfig, run
from sketchpinv.linalg import range_projector
from sketchpinv.matrices import gen_gaussian_rank_r

A = gen_gaussian_rank_r(20, 12, 8, seed=4)
P = range_projector(A)

# %%
# The ``project`` residual is ``||X A - A||_F``; the oracle column tracks
# the distance to the true projector.
res = run(A, SolverConfig("project", tau=4, seed=0, max_iters=150, tol_residual=1e-12,
                          trace_every=10), oracle=P)
for row in res.trace:
    print(f"k={row.iteration:4d}  residual={row.residual:.2e}  ||X - AA^+||={row.error_to_oracle:.2e}")
print("status:", res.status)
