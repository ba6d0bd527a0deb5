"""
SATAX against Newton-Schulz on a tall matrix
============================================

Sketched SATAX steps are cheap and make fast early progress, while
Newton-Schulz converges quadratically once it is close. The hybrid takes
one pass of SATAX and then hands over to Newton-Schulz.
"""
# %%
import numpy as np

from sketchpinv import SolverConfig, run
from sketchpinv.matrices import gen_gaussian_rank_r

A = gen_gaussian_rank_r(2000, 25, 20, seed=0)
nA = np.linalg.norm(A)


def flops_to(result, level):
    """Model flops spent when the relative residual first drops to ``level``."""
    for row in result.trace:
        if row.residual <= level * nA:
            return row.flops
    return float("inf")


# %%
# Every step is traced (``trace_every=1``) so the crossings are exact. The
# residual evaluations themselves are not charged any flops.
runs = {
    "satax_uni": run(A, SolverConfig("satax_uni", tau=5, seed=1, max_iters=20000,
                                     tol_residual=1e-8, trace_every=1)),
    "ns": run(A, SolverConfig("ns", max_iters=200, tol_residual=1e-8, trace_every=1)),
    "ns-satax": run(A, SolverConfig("ns-satax", tau=5, seed=1, max_iters=400,
                                    tol_residual=1e-8, trace_every=1)),
}

# %%
print(f"{'method':10s} {'1e-2':>10s} {'1e-6':>10s} {'1e-8':>10s}")
for name, res in runs.items():
    cols = " ".join(f"{flops_to(res, lvl):10.3g}" for lvl in (1e-2, 1e-6, 1e-8))
    print(f"{name:10s} {cols}")

# %%
# SATAX wins at low accuracy; Newton-Schulz wins at high accuracy; the
# hybrid gets the cheap start and the fast finish.
