"""
Sketch-and-project iterations for the pseudoinverse, Newton-Schulz, and the
NS-SATAX hybrid.

Every ``*_step`` function takes the matrix ``A``, the current iterate and a
:class:`~sketchpinv.sketching.SketchSample`, and returns the next iterate.
None of them forms ``A.T @ A`` or the identity-column sketch explicitly.

Sketch dimensions (``A`` is ``m x n``):

* ``satax_step``, ``project_step``, ``xa_step``: ``S`` selects columns of
  ``A`` (ambient dimension ``n``).
* ``sax_step``: ``S`` selects rows of ``A`` (ambient dimension ``m``).
* ``saxas_step``: ``A`` is symmetric ``n x n``.

``project_step`` solves ``min ||X - X_k||_F  s.t.  X A S = A S``. With
``M = A S`` the Lagrangian gives ``X = X_k + L M^T``; imposing the
constraint yields ``L (M^T M) = M - X_k M`` whose least-change solution is
``L = (M - X_k M)(M^T M)^+``, hence
``X_{k+1} = X_k - (X_k M - M)(M^T M)^+ M^T``.
"""
import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import flops as fl
from .linalg import as_matrix, pinv_psd, SYMMETRY_TOL
from .sketching import (
    sample_adaptive,
    sample_batch_with_replacement,
    sample_uniform_batch,
)

log = logging.getLogger(__name__)

METHODS = (
    "satax_uni", "satax_ada", "saxas_uni", "saxas_ada", "saxas_rep",
    "project", "sax", "xa", "ns", "ns-satax",
)
SAXAS_METHODS = ("saxas_uni", "saxas_ada", "saxas_rep")
SKETCHED = ("satax_uni", "satax_ada", "project", "sax", "xa") + SAXAS_METHODS
DIVERGENCE_STREAK = 5


def _gram(M):
    G = M.T @ M
    return 0.5 * (G + G.T)


def _check_shapes(A, X, shape, S=None, dim=None):
    if X.shape != shape:
        raise ValueError(f"iterate must have shape {shape}, got {X.shape}")
    if S is not None and S.dim != dim:
        raise ValueError(f"sketch must have ambient dimension {dim}, got {S.dim}")


def _subtract_sketch(V, S, transpose=False):
    """``V - S`` (or ``V - S.T``) without materializing selections."""
    if S.is_selection:
        V = V.copy()
        cols = np.arange(S.tau)
        rows = np.asarray(S.indices)
        if transpose:
            np.subtract.at(V, (cols, rows), 1.0)
        else:
            np.subtract.at(V, (rows, cols), 1.0)
        return V
    return V - (S.matrix.T if transpose else S.matrix)


def is_symmetric(A, tol=SYMMETRY_TOL):
    A = np.asarray(A)
    return A.shape[0] == A.shape[1] and np.linalg.norm(A - A.T) <= tol * max(np.linalg.norm(A), 1e-300)


def satax_step(A, X, S):
    """One projection onto ``S^T A^T A X = S^T A^T``."""
    m, n = A.shape
    _check_shapes(A, X, (n, m), S, n)
    M = S.right(A)              # A S,            m x tau
    W = A.T @ M                 # A^T A S,        n x tau
    P = pinv_psd(_gram(W))
    V = W.T @ X - M.T           # S^T A^T (A X - I)
    return X - W @ (P @ V)


def saxas_step(A, X, S):
    """One projection onto ``S^T A X A S = S^T A S`` for symmetric ``A``."""
    n = A.shape[0]
    if not is_symmetric(A):
        raise ValueError("A must be symmetric")
    _check_shapes(A, X, (n, n), S, n)
    M = S.right(A)
    P = pinv_psd(_gram(M))
    B = S.left(M) - M.T @ X @ M     # S^T (A - A X A) S
    core = P @ B @ P
    core = 0.5 * (core + core.T)
    return X + M @ core @ M.T


def project_step(A, X, S):
    """One projection onto ``X A S = A S``; iterates approach ``A A^+``."""
    m, n = A.shape
    _check_shapes(A, X, (m, m), S, n)
    M = S.right(A)
    P = pinv_psd(_gram(M))
    D = X @ M - M
    return X - (D @ P) @ M.T


def sax_step(A, X, S):
    """One projection onto ``S^T A X = S^T``; for full row rank ``A``."""
    m, n = A.shape
    _check_shapes(A, X, (n, m), S, m)
    K = S.left(A)               # S^T A,  tau x n
    P = pinv_psd(_gram(K.T))
    V = _subtract_sketch(K @ X, S, transpose=True)
    return X - K.T @ (P @ V)


def xa_step(A, X, S):
    """One projection onto ``X A S = S``; for full column rank ``A``."""
    m, n = A.shape
    _check_shapes(A, X, (n, m), S, n)
    M = S.right(A)
    P = pinv_psd(_gram(M))
    V = _subtract_sketch(X @ M, S)
    return X - (V @ P) @ M.T


def newton_schulz_step(A, X):
    """``2 X - X A X``, multiplying in the cheaper order."""
    m, n = A.shape
    if X.shape != (n, m):
        raise ValueError(f"iterate must have shape {(n, m)}, got {X.shape}")
    if n <= m:
        return 2.0 * X - (X @ A) @ X
    return 2.0 * X - X @ (A @ X)


def init_satax(A):
    """``X_0 = alpha A^T`` with ``alpha = min(m, n) / ||A||_F^2``."""
    A = as_matrix(A)
    nrm2 = float(np.sum(A * A))
    if nrm2 == 0.0:
        raise ValueError("A is the zero matrix")
    return (min(A.shape) / nrm2) * A.T


def init_saxas(A):
    """``X_0 = A^2 / ||A||_F^2`` for symmetric ``A``."""
    A = as_matrix(A)
    if not is_symmetric(A):
        raise ValueError("A must be symmetric")
    nrm2 = float(np.sum(A * A))
    if nrm2 == 0.0:
        raise ValueError("A is the zero matrix")
    X = (A @ A) / nrm2
    return 0.5 * (X + X.T)


def init_newton_schulz(A):
    """``X_0 = A^T / (2 ||A||_F^2)``, which guarantees ``||I - X_0 A||_2 < 1``."""
    A = as_matrix(A)
    nrm2 = float(np.sum(A * A))
    if nrm2 == 0.0:
        raise ValueError("A is the zero matrix")
    return A.T / (2.0 * nrm2)


DEFAULT_INIT = {
    "satax_uni": "scaled_transpose", "satax_ada": "scaled_transpose",
    "ns-satax": "scaled_transpose",
    "saxas_uni": "scaled_square", "saxas_ada": "scaled_square", "saxas_rep": "scaled_square",
    "project": "zero", "sax": "zero", "xa": "zero",
    "ns": "newton_schulz",
}


@dataclass
class SolverConfig:
    """
    Parameters of one solver run.

    ``init`` is a rule name (``"scaled_transpose"``, ``"scaled_square"``,
    ``"newton_schulz"``, ``"zero"``), an explicit array, or ``None`` for the
    method's default. ``trace_every`` and ``switch_iter`` default to one
    effective pass, ``ceil(min(m, n) / tau)`` sketched iterations.
    """

    method: str
    tau: int = 1
    seed: int = 0
    max_iters: int = 1000
    tol_residual: float = 1e-8
    trace_every: int = None
    init: object = None
    switch_iter: int = None

    def validate(self, A):
        m, n = A.shape
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.tau < 1:
            raise ValueError("tau must be at least 1")
        if self.method == "saxas_rep" and self.tau < 2:
            raise ValueError("saxas_rep requires tau >= 2")
        if self.tol_residual <= 0:
            raise ValueError("tol_residual must be positive")
        if self.max_iters < 0:
            raise ValueError("max_iters must be non-negative")
        if self.trace_every is not None and self.trace_every < 1:
            raise ValueError("trace_every must be at least 1")
        if self.method in SAXAS_METHODS and not is_symmetric(A):
            raise ValueError(f"{self.method} requires a symmetric matrix")
        if self.method in SKETCHED + ("ns-satax",) and self.method != "saxas_rep":
            dim = m if self.method == "sax" else n
            if self.tau > dim:
                raise ValueError(f"tau exceeds dimension ({self.tau} > {dim})")


@dataclass
class TraceRow:
    iteration: int
    phase: str
    elapsed_s: float
    flops: int
    residual: float
    error_to_oracle: float = None


@dataclass
class RunResult:
    X: np.ndarray
    trace: list = field(default_factory=list)
    status: str = "max_iters"     # "converged", "max_iters" or "diverged"

    @property
    def converged(self):
        return self.status == "converged"


def effective_pass(A, tau):
    """Sketched iterations whose ``A S`` products add up to one full product."""
    return max(1, math.ceil(min(A.shape) / tau))


def method_residual(A, X, method):
    """``||A X A - A||_F``; for ``project``, ``||X A - A||_F``."""
    if method == "project":
        return float(np.linalg.norm(X @ A - A))
    return float(np.linalg.norm(A @ (X @ A) - A))


def _initial(A, cfg):
    m, n = A.shape
    rule = DEFAULT_INIT[cfg.method] if cfg.init is None else cfg.init
    shape = (m, m) if cfg.method == "project" else (n, m)
    if not isinstance(rule, str):
        X = as_matrix(rule, "init")
        if X.shape != shape:
            raise ValueError(f"init must have shape {shape}")
        return X.copy(), 0
    if rule == "scaled_transpose":
        return init_satax(A), fl.init_scaled_transpose(m, n)
    if rule == "scaled_square":
        return init_saxas(A), fl.init_scaled_square(n)
    if rule == "newton_schulz":
        return init_newton_schulz(A), fl.init_scaled_transpose(m, n)
    if rule == "zero":
        return np.zeros(shape), 0
    raise ValueError(f"unknown init rule {rule!r}")


def _stepper(A, method, tau, rng):
    m, n = A.shape
    if method == "satax_uni":
        return lambda X: satax_step(A, X, sample_uniform_batch(n, tau, rng))
    if method == "satax_ada":
        return lambda X: satax_step(A, X, sample_adaptive(X, tau, rng))
    if method == "saxas_uni":
        return lambda X: saxas_step(A, X, sample_uniform_batch(n, tau, rng))
    if method == "saxas_ada":
        return lambda X: saxas_step(A, X, sample_adaptive(X, tau, rng))
    if method == "saxas_rep":
        return lambda X: saxas_step(A, X, sample_batch_with_replacement(n, tau, rng))
    if method == "project":
        return lambda X: project_step(A, X, sample_uniform_batch(n, tau, rng))
    if method == "sax":
        return lambda X: sax_step(A, X, sample_uniform_batch(m, tau, rng))
    if method == "xa":
        return lambda X: xa_step(A, X, sample_uniform_batch(n, tau, rng))
    if method == "ns":
        return lambda X: newton_schulz_step(A, X)
    raise ValueError(f"no stepper for {method!r}")


class _Recorder:
    def __init__(self, A, method, oracle, stop_at):
        self.A = A
        self.method = method
        self.oracle = oracle
        self.stop_at = stop_at
        self.trace = []
        self.rising = 0

    def __call__(self, k, phase, elapsed, flops, X, method=None):
        r = method_residual(self.A, X, method or self.method)
        err = None if self.oracle is None else float(np.linalg.norm(X - self.oracle))
        if phase == "ns" and self.trace and self.trace[-1].phase == "ns" and r > self.trace[-1].residual:
            self.rising += 1
        else:
            self.rising = 0
        self.trace.append(TraceRow(k, phase, elapsed, int(flops), r, err))
        return r <= self.stop_at


def _default_trace_every(A, cfg):
    if cfg.trace_every is not None:
        return cfg.trace_every
    if cfg.method == "ns":
        return 1
    return effective_pass(A, cfg.tau)


def run(A, cfg, oracle=None):
    """
    Run one solver to ``cfg.max_iters`` iterations or until the relative
    residual drops to ``cfg.tol_residual``.

    The residual is evaluated at iteration 0 and every ``trace_every``
    iterations (and at the last one); its cost is excluded from both the
    ``elapsed_s`` and ``flops`` columns.

    Parameters
    ----------
    A : array_like
    cfg : SolverConfig
    oracle : array_like, optional
        Target of the iteration (``A^+``, or ``A A^+`` for ``project``);
        when given, ``||X_k - oracle||_F`` is traced too.

    Returns
    -------
    RunResult
    """
    A = as_matrix(A)
    cfg.validate(A)
    if cfg.method == "ns-satax":
        return run_hybrid(A, cfg, oracle)
    m, n = A.shape
    rng = np.random.default_rng(cfg.seed)
    X, flops = _initial(A, cfg)
    step = _stepper(A, cfg.method, cfg.tau, rng)
    per_step = fl.step(cfg.method, m, n, cfg.tau)
    every = _default_trace_every(A, cfg)
    phase = "ns" if cfg.method == "ns" else cfg.method
    rec = _Recorder(A, cfg.method, oracle, cfg.tol_residual * np.linalg.norm(A))

    elapsed = 0.0
    if rec(0, phase, elapsed, flops, X):
        return RunResult(X, rec.trace, "converged")
    for k in range(1, cfg.max_iters + 1):
        t0 = time.perf_counter()
        X = step(X)
        elapsed += time.perf_counter() - t0
        flops += per_step
        if k % every == 0 or k == cfg.max_iters:
            if rec(k, phase, elapsed, flops, X):
                return RunResult(X, rec.trace, "converged")
            if rec.rising >= DIVERGENCE_STREAK:
                log.warning("Newton-Schulz residual rose %d times in a row; aborting", rec.rising)
                return RunResult(X, rec.trace, "diverged")
    return RunResult(X, rec.trace, "max_iters")


def run_hybrid(A, cfg, oracle=None):
    """
    NS-SATAX: ``switch_iter`` uniform SATAX iterations, then the rescaling
    ``X <- X / ||X A||_F``, then Newton-Schulz until the stopping rule holds.

    Rows are tagged ``"satax"`` or ``"ns"`` in the ``phase`` column; iteration
    numbers continue across the switch.
    """
    A = as_matrix(A)
    if cfg.method != "ns-satax":
        raise ValueError("run_hybrid needs method 'ns-satax'")
    cfg.validate(A)
    m, n = A.shape
    rng = np.random.default_rng(cfg.seed)
    X, flops = _initial(A, cfg)
    t = cfg.switch_iter if cfg.switch_iter is not None else effective_pass(A, cfg.tau)
    satax = _stepper(A, "satax_uni", cfg.tau, rng)
    every = cfg.trace_every if cfg.trace_every is not None else effective_pass(A, cfg.tau)
    rec = _Recorder(A, "ns", oracle, cfg.tol_residual * np.linalg.norm(A))

    elapsed = 0.0
    if rec(0, "satax", elapsed, flops, X):
        return RunResult(X, rec.trace, "converged")
    k = 0
    while k < min(t, cfg.max_iters):
        k += 1
        t0 = time.perf_counter()
        X = satax(X)
        elapsed += time.perf_counter() - t0
        flops += fl.satax_step(m, n, cfg.tau)
        if k % every == 0 or k == t:
            if rec(k, "satax", elapsed, flops, X):
                return RunResult(X, rec.trace, "converged")

    t0 = time.perf_counter()
    scale = np.linalg.norm(X @ A)
    if scale > 0:
        X = X / scale
    elapsed += time.perf_counter() - t0
    flops += fl.hybrid_rescale(m, n)

    while k < cfg.max_iters:
        k += 1
        t0 = time.perf_counter()
        X = newton_schulz_step(A, X)
        elapsed += time.perf_counter() - t0
        flops += fl.ns_step(m, n)
        if rec(k, "ns", elapsed, flops, X):
            return RunResult(X, rec.trace, "converged")
        if rec.rising >= DIVERGENCE_STREAK:
            log.warning("Newton-Schulz residual rose %d times in a row; aborting", rec.rising)
            return RunResult(X, rec.trace, "diverged")
    return RunResult(X, rec.trace, "max_iters")
