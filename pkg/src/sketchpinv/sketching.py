"""
Discrete sketch distributions.

A sketch ``S`` is either a selection of identity columns (drawn with or
without replacement) or an explicit dense matrix. Column selections are never
materialized when multiplying: ``A @ S`` becomes ``A[:, idx]``.
"""
from dataclasses import dataclass, field
from itertools import combinations, product
from math import comb

import numpy as np

from .linalg import as_matrix

SUBSET = "subset"
MULTISET = "multiset"
EXPLICIT = "explicit"

MAX_OUTCOMES = 200_000


@dataclass(frozen=True, eq=False)
class SketchSample:
    """
    A realized sketch.

    ``kind`` is one of ``"subset"`` (distinct, increasing indices),
    ``"multiset"`` (indices with repeats, in draw order) or ``"explicit"``
    (a dense ``dim x tau`` matrix held in ``matrix``).
    """

    kind: str
    dim: int
    indices: tuple = ()
    matrix: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind == EXPLICIT:
            M = as_matrix(self.matrix, "S")
            if M.shape[0] != self.dim:
                raise ValueError("explicit sketch must have ambient-dimension rows")
            object.__setattr__(self, "matrix", M)
            return
        if self.kind not in (SUBSET, MULTISET):
            raise ValueError(f"unknown sketch kind {self.kind!r}")
        idx = tuple(int(i) for i in self.indices)
        if not idx:
            raise ValueError("sketch needs at least one index")
        if min(idx) < 0 or max(idx) >= self.dim:
            raise ValueError("sketch index out of range")
        if self.kind == SUBSET and any(a >= b for a, b in zip(idx, idx[1:])):
            raise ValueError("subset indices must be strictly increasing")
        object.__setattr__(self, "indices", idx)

    @property
    def tau(self):
        if self.kind == EXPLICIT:
            return self.matrix.shape[1]
        return len(self.indices)

    @property
    def is_selection(self):
        return self.kind != EXPLICIT

    def right(self, A):
        """``A @ S`` (column gather for selections)."""
        if self.is_selection:
            return A[:, list(self.indices)]
        return A @ self.matrix

    def left(self, A):
        """``S.T @ A`` (row gather for selections)."""
        if self.is_selection:
            return A[list(self.indices), :]
        return self.matrix.T @ A

    def materialize(self):
        if self.is_selection:
            S = np.zeros((self.dim, self.tau))
            S[list(self.indices), np.arange(self.tau)] = 1.0
            return S
        return self.matrix.copy()


def subset(indices, dim):
    return SketchSample(SUBSET, dim, tuple(sorted(indices)))


def multiset(indices, dim):
    return SketchSample(MULTISET, dim, tuple(indices))


def explicit(S):
    S = as_matrix(S, "S")
    return SketchSample(EXPLICIT, S.shape[0], matrix=S)


def _check_tau(n, tau):
    if tau < 1:
        raise ValueError("tau must be at least 1")
    if tau > n:
        raise ValueError(f"tau exceeds dimension ({tau} > {n})")


def sample_uniform_batch(n, tau, rng):
    """Uniformly random ``tau``-subset of ``range(n)`` as identity columns."""
    _check_tau(n, tau)
    idx = rng.choice(n, size=tau, replace=False)
    return SketchSample(SUBSET, n, tuple(sorted(idx.tolist())))


def sample_adaptive(X, tau, rng):
    """``tau`` uniformly chosen distinct columns of the current iterate ``X``."""
    X = np.asarray(X, dtype=np.float64)
    _check_tau(X.shape[1], tau)
    idx = np.sort(rng.choice(X.shape[1], size=tau, replace=False))
    return SketchSample(EXPLICIT, X.shape[0], matrix=X[:, idx])


def sample_batch_with_replacement(n, tau, rng, probs=None):
    """
    ``tau`` independent indices in ``range(n)``.

    ``probs`` gives per-coordinate probabilities; all must be positive so
    that every index tuple has positive probability.
    """
    if tau < 1:
        raise ValueError("tau must be at least 1")
    if probs is not None:
        probs = np.asarray(probs, dtype=np.float64)
        if probs.shape != (n,):
            raise ValueError("probs must have length n")
        if np.any(probs <= 0):
            raise ValueError("probs must be strictly positive")
        probs = probs / probs.sum()
    idx = rng.choice(n, size=tau, replace=True, p=probs)
    return SketchSample(MULTISET, n, tuple(idx.tolist()))


@dataclass(frozen=True, eq=False)
class DiscreteSketchDistribution:
    """Finitely many sketches ``samples[i]`` drawn with probability ``probs[i]``."""

    samples: tuple
    probs: np.ndarray

    def __post_init__(self):
        samples = tuple(self.samples)
        probs = np.asarray(self.probs, dtype=np.float64)
        if len(samples) == 0 or probs.shape != (len(samples),):
            raise ValueError("need one probability per sample")
        if np.any(probs <= 0):
            raise ValueError("probabilities must be strictly positive")
        if abs(probs.sum() - 1.0) > 1e-12:
            raise ValueError("probabilities must sum to 1")
        dims = {s.dim for s in samples}
        if len(dims) != 1:
            raise ValueError("samples must share the ambient dimension")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "probs", probs)

    @property
    def dim(self):
        return self.samples[0].dim

    def stack(self):
        """Column concatenation ``[S_1, ..., S_r]``."""
        return np.hstack([s.materialize() for s in self.samples])

    def draw(self, rng):
        return self.samples[rng.choice(len(self.samples), p=self.probs)]


def _uniform(samples):
    samples = list(samples)
    return DiscreteSketchDistribution(samples, np.full(len(samples), 1.0 / len(samples)))


def full_sketch(n):
    """The single sketch ``S = I``."""
    return DiscreteSketchDistribution([SketchSample(SUBSET, n, tuple(range(n)))], [1.0])


def singletons(n):
    """Uniform over the unit vectors ``e_1, ..., e_n``."""
    return _uniform(SketchSample(SUBSET, n, (i,)) for i in range(n))


def uniform_batch_distribution(n, tau):
    """All ``tau``-subsets of ``range(n)`` with equal weight."""
    _check_tau(n, tau)
    if comb(n, tau) > MAX_OUTCOMES:
        raise ValueError(f"analysis cap: C({n},{tau}) outcomes exceed {MAX_OUTCOMES}")
    return _uniform(SketchSample(SUBSET, n, c) for c in combinations(range(n), tau))


def with_replacement_distribution(n, tau, probs=None):
    """All ``n**tau`` index tuples; product weights from per-coordinate ``probs``."""
    if tau < 1:
        raise ValueError("tau must be at least 1")
    if n**tau > MAX_OUTCOMES:
        raise ValueError(f"analysis cap: {n}**{tau} outcomes exceed {MAX_OUTCOMES}")
    tuples = list(product(range(n), repeat=tau))
    if probs is None:
        return _uniform(SketchSample(MULTISET, n, v) for v in tuples)
    probs = np.asarray(probs, dtype=np.float64)
    if np.any(probs <= 0):
        raise ValueError("probs must be strictly positive")
    probs = probs / probs.sum()
    p = np.array([np.prod(probs[list(v)]) for v in tuples])
    return DiscreteSketchDistribution([SketchSample(MULTISET, n, v) for v in tuples], p / p.sum())


def convenient_probabilities(G, samples):
    """
    Weights ``p_i`` proportional to ``trace(S_i.T G^2 S_i)``.

    Samples whose trace vanishes carry no information and are dropped.

    Returns
    -------
    DiscreteSketchDistribution
        Over the retained samples, in their original order.
    """
    G = as_matrix(G, "G")
    traces = []
    for s in samples:
        GS = s.right(G)  # G is symmetric, so G @ S
        traces.append(float(np.sum(GS * GS)))
    traces = np.asarray(traces)
    scale = traces.max() if traces.size else 0.0
    if scale <= 0.0:
        raise ValueError("distribution degenerate")
    keep = traces > 1e-14 * scale
    kept = [s for s, k in zip(samples, keep) if k]
    p = traces[keep] / traces[keep].sum()
    return DiscreteSketchDistribution(kept, p)
