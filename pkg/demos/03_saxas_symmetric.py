"""
SAXAS on a symmetric matrix
===========================

For symmetric ``A`` the two-sided SAXAS update keeps every iterate
symmetric and confines the error to ``Range(A)``.
"""
# %%
import numpy as np

from sketchpinv import init_saxas, pinv_exact, sample_uniform_batch, saxas_step
from sketchpinv.linalg import range_projector
from sketchpinv.matrices import gen_sym_rank_r

A = gen_sym_rank_r(12, 6, seed=3)
Ad = pinv_exact(A)
Pi = range_projector(A)
rng = np.random.default_rng(0)

# %%
# Start from ``A^2 / ||A||_F^2`` and take uniform batches of four indices.
X = init_saxas(A)
for k in range(1, 201):
    X = saxas_step(A, X, sample_uniform_batch(12, 4, rng))
    if k % 40 == 0:
        D = X - Ad
        print(f"k={k:3d}  err={np.linalg.norm(D):.3e}  "
              f"asym={np.linalg.norm(X - X.T):.1e}  "
              f"outside range={np.linalg.norm(D - Pi @ D @ Pi):.1e}")
