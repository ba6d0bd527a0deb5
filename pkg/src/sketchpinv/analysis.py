"""
Convergence rates of SATAX and SAXAS for discrete sketch distributions.

These routines form dense ``n x n`` (SATAX) or ``n^2 x n^2`` (SAXAS)
expectations and are meant for small verification problems. The dimension
caps can be raised with the ``PINV_ANALYSIS_CAP`` environment variable.
"""
import os
from dataclasses import dataclass

import numpy as np

from .linalg import DEFAULT_REL_TOL, as_matrix, lambda_min_plus, pinv_psd, rank
from .sketching import MULTISET, SUBSET, convenient_probabilities

SATAX_CAP = 200
SAXAS_CAP = 12
MAX_KRON_SAMPLES = 4096
RHO_SLACK = 1e-10


@dataclass
class RateReport:
    rho_exact: float
    rho_bound: float = None
    certified: bool = False
    spectrum_note: str = ""

    def as_dict(self):
        return {
            "rho_exact": self.rho_exact,
            "rho_bound": self.rho_bound,
            "certified": self.certified,
            "spectrum_note": self.spectrum_note,
        }


def _cap(default):
    env = os.environ.get("PINV_ANALYSIS_CAP")
    return int(env) if env else default


def _guard(A, default):
    cap = _cap(default)
    if max(A.shape) > cap:
        raise ValueError(f"analysis cap: dimension {max(A.shape)} exceeds {cap} (set PINV_ANALYSIS_CAP)")


def _clamp_rate(rho):
    if not -RHO_SLACK <= rho <= 1 + RHO_SLACK:
        raise ArithmeticError(f"rate {rho} outside [0, 1]")
    return float(min(max(rho, 0.0), 1.0))


def _projector_average(W_of, samples, probs):
    """``sum_i p_i W_i (W_i^T W_i)^+ W_i^T`` with ``W_i = W_of(S_i)``."""
    selections = all(s.kind in (SUBSET, MULTISET) for s in samples)
    taus = {s.tau for s in samples}
    if selections and len(taus) == 1:
        idx = np.array([s.indices for s in samples])
        W = np.moveaxis(W_of(idx), 0, -2)            # (r, rows, tau)
        G = np.swapaxes(W, -1, -2) @ W
        G = 0.5 * (G + np.swapaxes(G, -1, -2))
        w, V = np.linalg.eigh(G)
        lmax = w[:, -1:]
        keep = (w > DEFAULT_REL_TOL * lmax) & (lmax > 0)
        inv = np.where(keep, 1.0 / np.where(keep, w, 1.0), 0.0)
        P = (V * inv[:, None, :]) @ np.swapaxes(V, -1, -2)
        return np.einsum("r,ria,rab,rjb->ij", probs, W, P, W)
    out = 0.0
    for p, s in zip(probs, samples):
        W = W_of(s)
        out = out + p * (W @ pinv_psd(W.T @ W) @ W.T)
    return out


def expected_projection_satax(A, dist):
    """``E[Z]`` with ``Z = A^T A S (S^T (A^T A)^2 S)^+ S^T A^T A``."""
    A = as_matrix(A)
    AtA = A.T @ A

    def W_of(arg):
        if isinstance(arg, np.ndarray):
            return AtA[:, arg]                      # (n, r, tau)
        return arg.right(AtA)

    EZ = _projector_average(W_of, dist.samples, dist.probs)
    return 0.5 * (EZ + EZ.T)


def satax_rate_exact(A, dist):
    """
    ``rho = 1 - lambda_min^+(A^T A E[H_S] A^T A)``.

    ``rho_bound`` is filled with the scaled-condition-number bound when
    ``dist`` carries the convenient probabilities.
    """
    A = as_matrix(A)
    _guard(A, SATAX_CAP)
    if dist.dim != A.shape[1]:
        raise ValueError("sketch dimension must equal the number of columns of A")
    EZ = expected_projection_satax(A, dist)
    lam = lambda_min_plus(EZ)
    rho = _clamp_rate(1.0 - lam) if lam > 0 else 1.0
    bound = None
    conv = convenient_probabilities(A.T @ A, dist.samples)
    if len(conv.samples) == len(dist.samples) and np.allclose(conv.probs, dist.probs, rtol=1e-10, atol=0):
        bound = satax_rate_bound(A, dist.stack())
    return RateReport(
        rho_exact=rho,
        rho_bound=bound,
        certified=rho < 1.0,
        spectrum_note=f"lambda_min+(E[Z]) = {lam:.6g}",
    )


def satax_rate_bound(A, S_stack, power=2):
    """
    ``1 - lambda_min^+(M) / trace(M)`` with ``M = S^T (A^T A)^power S``.

    ``power=2`` is the SATAX bound; ``power=1`` gives the bound for the
    range-space projection iteration.
    """
    A = as_matrix(A)
    S_stack = as_matrix(S_stack, "S_stack")
    if power == 2:
        K = A.T @ (A @ S_stack)
    elif power == 1:
        K = A @ S_stack
    else:
        raise ValueError("power must be 1 or 2")
    M = K.T @ K
    M = 0.5 * (M + M.T)
    tr = float(np.trace(M))
    if tr <= 0.0:
        raise ValueError("S^T (A^T A)^2 S is zero")
    return _clamp_rate(1.0 - lambda_min_plus(M) / tr)


def expected_kron_projection(A, dist):
    """``E[Z kron Z]`` with ``Z = A S (S^T A^2 S)^+ S^T A``."""
    A = as_matrix(A)
    n = A.shape[0]
    out = np.zeros((n * n, n * n))
    for p, s in zip(dist.probs, dist.samples):
        M = s.right(A)
        Z = M @ pinv_psd(0.5 * (M.T @ M + (M.T @ M).T)) @ M.T
        out += p * np.kron(Z, Z)
    return 0.5 * (out + out.T)


def saxas_rate_bound(A, dist):
    """
    Rate of SAXAS for a discrete distribution.

    ``rho_bound = 1 - lambda_min^+(E[Z kron Z])``. ``rho_exact`` is the
    infimum over ``R = A Q A`` computed by restricting ``E[Z kron Z]`` to
    ``Range(A kron A)``. ``certified`` is the nullspace test of
    :func:`saxas_convergence_certificate`; when it holds, the bound is a
    valid rate below one.
    """
    A = as_matrix(A)
    _guard(A, SAXAS_CAP)
    if dist.dim != A.shape[0]:
        raise ValueError("sketch dimension must equal the order of A")
    EK = expected_kron_projection(A, dist)
    lam = lambda_min_plus(EK)
    bound = _clamp_rate(1.0 - lam) if lam > 0 else 1.0

    U, s, _ = np.linalg.svd(A)
    Ur = U[:, s > DEFAULT_REL_TOL * s[0]]
    Q = np.kron(Ur, Ur)
    K = Q.T @ EK @ Q
    inf = float(np.linalg.eigvalsh(0.5 * (K + K.T))[0])
    exact = _clamp_rate(1.0 - inf)

    certified = saxas_convergence_certificate(A, dist.samples)
    return RateReport(
        rho_exact=exact,
        rho_bound=bound,
        certified=bool(certified and bound < 1.0),
        spectrum_note=f"lambda_min+(E[Z kron Z]) = {lam:.6g}, rank(A) = {Ur.shape[1]}",
    )


def stacked_kron_sketch(samples, n):
    """Rows ``S_i^T kron S_i^T`` stacked over all samples."""
    blocks = []
    for s in samples:
        if s.is_selection:
            v = np.asarray(s.indices)
            cols = (v[:, None] * n + v[None, :]).ravel()
            B = np.zeros((cols.size, n * n))
            B[np.arange(cols.size), cols] = 1.0
        else:
            St = s.matrix.T
            B = np.kron(St, St)
        blocks.append(B)
    return np.vstack(blocks)


def saxas_convergence_certificate(A, samples):
    """
    True when ``Null(SS (A kron A)) = Null(A kron A)`` for the stacked
    sketch ``SS``, which guarantees a SAXAS rate below one.
    """
    A = as_matrix(A)
    _guard(A, SAXAS_CAP)
    samples = list(samples)
    if len(samples) > MAX_KRON_SAMPLES:
        raise ValueError(f"analysis cap: {len(samples)} samples exceed {MAX_KRON_SAMPLES}")
    n = A.shape[0]
    AA = np.kron(A, A)
    SS = stacked_kron_sketch(samples, n)
    return rank(SS @ AA) == rank(AA)


def convenient_distribution(A, samples):
    """Samples reweighted with ``p_i`` proportional to ``trace(S_i^T (A^T A)^2 S_i)``."""
    A = as_matrix(A)
    return convenient_probabilities(A.T @ A, samples)


def monte_carlo_contraction(step, A, X0, target, dist, trials, rng):
    """
    Average one-step ratio ``||X_1 - target||^2 / ||X_0 - target||^2`` over
    ``trials`` sketches drawn from ``dist``.
    """
    e0 = np.sum((X0 - target) ** 2)
    acc = 0.0
    for _ in range(trials):
        X1 = step(A, X0, dist.draw(rng))
        acc += np.sum((X1 - target) ** 2)
    return acc / (trials * e0)

