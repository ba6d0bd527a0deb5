"""
Dense linear algebra kernels shared by the solvers and the rate analysis.

Matrices are plain ``float64`` numpy arrays. Every rank decision uses a
relative threshold: a singular value (or eigenvalue) ``s`` counts as zero
when ``s <= rel_tol * s_max``.
"""
from dataclasses import dataclass

import numpy as np

DEFAULT_REL_TOL = 1e-12
SYMMETRY_TOL = 1e-12


def as_matrix(A, name="A"):
    """Return ``A`` as a finite 2-D float64 array."""
    A = np.asarray(A, dtype=np.float64)
    if A.ndim == 1:
        A = A[:, None]
    if A.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} has non-finite entries")
    return A


def _check_symmetric(G):
    scale = np.linalg.norm(G)
    if np.linalg.norm(G - G.T) > SYMMETRY_TOL * max(scale, np.finfo(float).tiny):
        raise ValueError("not symmetric")


@dataclass(frozen=True)
class SpectralInfo:
    """Sorted (descending) non-negative spectrum with its numerical rank."""

    values: np.ndarray
    rank: int
    zero_threshold: float


def singular_info(A, rel_tol=DEFAULT_REL_TOL):
    s = np.linalg.svd(as_matrix(A), compute_uv=False)
    thresh = rel_tol * s[0] if s.size else 0.0
    return SpectralInfo(s, int(np.count_nonzero(s > thresh)), float(thresh))


def psd_info(G, rel_tol=DEFAULT_REL_TOL):
    G = as_matrix(G, "G")
    _check_symmetric(G)
    w = np.clip(np.linalg.eigvalsh(G)[::-1], 0.0, None)
    thresh = rel_tol * w[0] if w.size else 0.0
    return SpectralInfo(w, int(np.count_nonzero(w > thresh)), float(thresh))


def rank(A, rel_tol=DEFAULT_REL_TOL):
    return singular_info(A, rel_tol).rank


def pinv_exact(A, rel_tol=DEFAULT_REL_TOL):
    """
    Moore-Penrose pseudoinverse through a thin SVD.

    Parameters
    ----------
    A : array_like, shape (m, n)
    rel_tol : float
        Singular values at or below ``rel_tol * sigma_max`` are treated as
        zero and mapped to zero instead of being inverted.

    Returns
    -------
    ndarray, shape (n, m)
    """
    A = as_matrix(A)
    if A.size == 0:
        raise ValueError("empty matrix")
    if rel_tol <= 0:
        raise ValueError("rel_tol must be positive")
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    keep = s > rel_tol * s[0]
    s_inv = np.zeros_like(s)
    s_inv[keep] = 1.0 / s[keep]
    return (Vt.T * s_inv) @ U.T


def pinv_psd(G, rel_tol=DEFAULT_REL_TOL):
    """
    Pseudoinverse of a small symmetric positive semidefinite matrix.

    Uses a symmetric eigendecomposition, so the result is symmetric by
    construction. Eigenvalues at or below ``rel_tol * lambda_max`` (including
    slightly negative rounding noise) are dropped.
    """
    G = as_matrix(G, "G")
    _check_symmetric(G)
    G = 0.5 * (G + G.T)
    w, V = np.linalg.eigh(G)
    lmax = w[-1] if w.size else 0.0
    if lmax <= 0.0:
        return np.zeros_like(G)
    keep = w > rel_tol * lmax
    Vk = V[:, keep]
    P = (Vk / w[keep]) @ Vk.T
    return 0.5 * (P + P.T)


def lambda_min_plus(G, rel_tol=DEFAULT_REL_TOL):
    """Smallest eigenvalue above ``rel_tol * lambda_max``; 0 for the zero matrix."""
    info = psd_info(G, rel_tol)
    if info.rank == 0:
        return 0.0
    return float(info.values[info.rank - 1])


def kron(A, B):
    """Kronecker product with ``(A kron B)[p*r + i, q*s + j] = A[r, s] * B[i, j]``."""
    return np.kron(as_matrix(A), as_matrix(B, "B"))


def vec(A):
    """Stack the columns of ``A`` into a single column."""
    A = as_matrix(A)
    return A.reshape(-1, 1, order="F")


def unvec(v, rows, cols):
    return np.asarray(v, dtype=np.float64).reshape(rows, cols, order="F")


def range_projector(A, rel_tol=DEFAULT_REL_TOL):
    """Orthogonal projector onto Range(A), i.e. ``A A^+``."""
    A = as_matrix(A)
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    Uk = U[:, s > rel_tol * s[0]]
    return Uk @ Uk.T


def residual(A, X):
    """Frobenius norm of ``A X A - A``; evaluated as ``A (X A) - A``."""
    A = as_matrix(A)
    X = as_matrix(X, "X")
    m, n = A.shape
    if X.shape != (n, m):
        raise ValueError(f"X must have shape {(n, m)}, got {X.shape}")
    return float(np.linalg.norm(A @ (X @ A) - A))


def penrose_errors(A, X):
    """Frobenius errors of the four Penrose conditions, in order."""
    AX = A @ X
    XA = X @ A
    return (
        float(np.linalg.norm(AX @ A - A)),
        float(np.linalg.norm(XA @ X - X)),
        float(np.linalg.norm(AX - AX.T)),
        float(np.linalg.norm(XA - XA.T)),
    )
