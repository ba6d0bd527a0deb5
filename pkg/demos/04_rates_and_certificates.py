"""
Convergence rates and certificates
==================================

For a finite sketch distribution the expected contraction of SATAX is
available in closed form. We compare it with the cheap trace bound, check
it against simulation, and certify SAXAS with batches drawn with replacement.
"""
# %%
import numpy as np

from sketchpinv import init_satax, pinv_exact, satax_rate_exact, satax_step
from sketchpinv.analysis import convenient_distribution, saxas_rate_bound
from sketchpinv.matrices import gen_gaussian_rank_r, gen_sym_rank_r
from sketchpinv.sketching import singletons, uniform_batch_distribution, with_replacement_distribution

A = gen_gaussian_rank_r(12, 8, 5, seed=0)

# %%
# With probabilities proportional to the column norms of ``A^T A``, the
# exact rate can be compared with the bound.
rep = satax_rate_exact(A, convenient_distribution(A, singletons(8).samples))
print("convenient singletons:", rep.as_dict())

# %%
# Uniform batches of three columns: does a simulated mean squared error
# track ``rho^k``?
dist = uniform_batch_distribution(8, 3)
rho = satax_rate_exact(A, dist).rho_exact
Ad = pinv_exact(A)
rng = np.random.default_rng(1)
k, trials = 20, 300
e0 = np.linalg.norm(init_satax(A) - Ad) ** 2
acc = 0.0
for _ in range(trials):
    X = init_satax(A)
    for _ in range(k):
        X = satax_step(A, X, dist.draw(rng))
    acc += np.linalg.norm(X - Ad) ** 2
print(f"rho={rho:.4f}  rho^k={rho**k:.3e}  observed={acc / trials / e0:.3e}")

# %%
# SAXAS needs sketches whose Kronecker stack sees all of ``Range(A kron A)``.
# Single indices miss the off-diagonal entries; pairs drawn with replacement
# do not.
S = gen_sym_rank_r(4, 4, seed=2)
for tau in (1, 2):
    r = saxas_rate_bound(S, with_replacement_distribution(4, tau))
    print(f"tau={tau}: certified={r.certified}  rho_exact={r.rho_exact:.4f}")
