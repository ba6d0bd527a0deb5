"""
Closed-form flop counts for one iteration of each method.

A multiply-add counts as 2 flops, an addition or scaling as 1. The
pseudoinverse of a ``tau x tau`` PSD Gram matrix is charged ``14 tau^3``.
Gathering columns of ``A`` for identity-column sketches costs nothing;
explicit (adaptive) sketches pay for the product ``A S``.
Residual evaluations are never counted.
"""

PINV_CONST = 14

EXPLANATION = """\
Flop model (multiply-add = 2 flops, add/scale = 1 flop, A is m x n, tau = sketch size)

  pinv_psd(tau x tau)   14 tau^3
  satax step            [2 m n tau if adaptive]  AS
                        + 2 n m tau              W = A^T (AS)
                        + 2 n tau^2              G = W^T W
                        + 14 tau^3               pinv(G)
                        + 2 tau n m + tau m      V = W^T X - (AS)^T
                        + 2 tau^2 m              P V
                        + 2 n tau m + n m        X - W (P V)
  saxas step (n x n)    [2 n^2 tau if adaptive]  M = AS
                        + 2 n tau^2              G = M^T M
                        + 14 tau^3               pinv(G)
                        [+ 2 n tau^2 if adaptive] S^T A S
                        + 2 tau n^2 + 2 tau^2 n  M^T X M
                        + tau^2 + 4 tau^3        P (S^T A S - M^T X M) P
                        + 2 n tau^2 + 2 n^2 tau + n^2   X + M core M^T
  project step (X m x m) 2 m tau^2 + 14 tau^3 + 2 m^2 tau + m tau
                        + 2 m tau^2 + 2 m^2 tau + m^2
  sax step              2 n tau^2 + 14 tau^3 + 2 tau n m + tau + 2 tau^2 m + 2 n tau m + n m
  xa step               2 m tau^2 + 14 tau^3 + 2 n m tau + tau + 2 n tau^2 + 2 n tau m + n m
  newton-schulz step    4 m n min(m, n)
  init alpha*A^T        3 m n
  init A^2/||A||^2      2 n^3 + 3 n^2
  hybrid rescale        2 n^2 m + 2 n^2 + n m   (||X_t A||_F and X_t / scale)
"""


def satax_step(m, n, tau, adaptive=False):
    f = 2 * n * m * tau + 2 * n * tau**2 + PINV_CONST * tau**3
    f += 2 * tau * n * m + tau * m + 2 * tau**2 * m + 2 * n * tau * m + n * m
    if adaptive:
        f += 2 * m * n * tau
    return f


def saxas_step(n, tau, adaptive=False):
    f = 2 * n * tau**2 + PINV_CONST * tau**3
    f += 2 * tau * n**2 + 2 * tau**2 * n + tau**2 + 4 * tau**3
    f += 2 * n * tau**2 + 2 * n**2 * tau + n**2
    if adaptive:
        f += 2 * n**2 * tau + 2 * n * tau**2
    return f


def project_step(m, n, tau):
    return (2 * m * tau**2 + PINV_CONST * tau**3 + 2 * m**2 * tau + m * tau
            + 2 * m * tau**2 + 2 * m**2 * tau + m**2)


def sax_step(m, n, tau):
    return (2 * n * tau**2 + PINV_CONST * tau**3 + 2 * tau * n * m + tau
            + 2 * tau**2 * m + 2 * n * tau * m + n * m)


def xa_step(m, n, tau):
    return (2 * m * tau**2 + PINV_CONST * tau**3 + 2 * n * m * tau + tau
            + 2 * n * tau**2 + 2 * n * tau * m + n * m)


def ns_step(m, n):
    return 4 * m * n * min(m, n)


def init_scaled_transpose(m, n):
    return 3 * m * n


def init_scaled_square(n):
    return 2 * n**3 + 3 * n**2


def hybrid_rescale(m, n):
    return 2 * n * n * m + 2 * n * n + n * m


def step(method, m, n, tau):
    """Per-iteration flops for a method name as used by the solvers."""
    if method in ("satax_uni", "satax_ada"):
        return satax_step(m, n, tau, adaptive=method == "satax_ada")
    if method in ("saxas_uni", "saxas_ada", "saxas_rep"):
        return saxas_step(n, tau, adaptive=method == "saxas_ada")
    if method == "project":
        return project_step(m, n, tau)
    if method == "sax":
        return sax_step(m, n, tau)
    if method == "xa":
        return xa_step(m, n, tau)
    if method == "ns":
        return ns_step(m, n)
    raise ValueError(f"no flop model for {method!r}")
