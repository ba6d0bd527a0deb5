import numpy as np
import pytest

from sketchpinv.analysis import (
    convenient_distribution,
    expected_kron_projection,
    expected_projection_satax,
    monte_carlo_contraction,
    satax_rate_bound,
    satax_rate_exact,
    saxas_convergence_certificate,
    saxas_rate_bound,
    stacked_kron_sketch,
)
from sketchpinv.linalg import lambda_min_plus, pinv_exact
from sketchpinv.sketching import (
    convenient_probabilities,
    full_sketch,
    singletons,
    subset,
    uniform_batch_distribution,
    with_replacement_distribution,
)
from sketchpinv.solvers import satax_step, saxas_step

from conftest import random_rank, random_sym_rank


def brute_expected_z(A, dist):
    AtA = A.T @ A
    EZ = 0
    for p, s in zip(dist.probs, dist.samples):
        S = s.materialize()
        H = S @ np.linalg.pinv(S.T @ AtA @ AtA @ S) @ S.T
        EZ = EZ + p * AtA @ H @ AtA
    return EZ


class TestSataxRate:
    def test_full_sketch(self, rng):
        for _ in range(5):
            A = random_rank(7, 5, int(rng.integers(1, 6)), rng)
            assert satax_rate_exact(A, full_sketch(5)).rho_exact == pytest.approx(0, abs=1e-10)

    @pytest.mark.parametrize("d", [[1.0, 1.0], [2.0, 1.0]])
    def test_diag_singletons(self, d):
        rep = satax_rate_exact(np.diag(d), singletons(2))
        assert rep.rho_exact == pytest.approx(0.5, abs=1e-12)
        assert rep.certified

    def test_expected_z_matches_brute_force(self, rng):
        A = random_rank(6, 5, 3, rng)
        for dist in (singletons(5), uniform_batch_distribution(5, 2), with_replacement_distribution(5, 2)):
            np.testing.assert_allclose(expected_projection_satax(A, dist), brute_expected_z(A, dist),
                                       atol=1e-10)

    def test_cap(self, monkeypatch):
        monkeypatch.setenv("PINV_ANALYSIS_CAP", "3")
        with pytest.raises(ValueError, match="analysis cap"):
            satax_rate_exact(np.eye(4), singletons(4))

    def test_bound_examples(self):
        assert satax_rate_bound(np.eye(2), np.eye(2)) == pytest.approx(0.5)
        u = np.array([[1.0], [2.0], [2.0]])
        A = u @ u.T
        assert satax_rate_bound(A, u) == pytest.approx(0.0, abs=1e-12)

    def test_bound_zero(self):
        with pytest.raises(ValueError):
            satax_rate_bound(np.diag([1.0, 0.0]), np.array([[0.0], [1.0]]))

    def test_exact_below_bound_convenient(self, rng):
        for _ in range(20):
            n = int(rng.integers(2, 11))
            A = random_rank(int(rng.integers(n, 14)), n, int(rng.integers(1, n + 1)), rng)
            dist = convenient_distribution(A, singletons(n).samples)
            rep = satax_rate_exact(A, dist)
            assert rep.rho_bound is not None
            assert rep.rho_exact <= satax_rate_bound(A, dist.stack()) + 1e-10

    def test_convenient_lower_bound(self, rng):
        # lambda_min+(G E[S (S^T G^2 S)^+ S^T] G) >= lambda_min+(SS^T G^2 SS) / tr(SS^T G^2 SS)
        for _ in range(50):
            n = int(rng.integers(2, 8))
            W = random_rank(n, n, int(rng.integers(1, n + 1)), rng)
            G = W @ W.T
            G = 0.5 * (G + G.T)
            dist = convenient_probabilities(G, singletons(n).samples)
            EH = sum(p * s.materialize() @ np.linalg.pinv(s.materialize().T @ G @ G @ s.materialize())
                     @ s.materialize().T for p, s in zip(dist.probs, dist.samples))
            lhs = lambda_min_plus(0.5 * (G @ EH @ G + (G @ EH @ G).T))
            SS = dist.stack()
            M = SS.T @ G @ G @ SS
            rhs = lambda_min_plus(0.5 * (M + M.T)) / np.trace(M)
            assert lhs >= rhs - 1e-10

    def test_monte_carlo_contraction(self, rng):
        # start on the slowest eigendirection of E[Z]; one-step contraction is 1 - lambda_min+
        for trial in range(3):
            n = int(rng.integers(3, 7))
            A = random_rank(n + 2, n, int(rng.integers(2, n + 1)), rng)
            dist = singletons(n)
            EZ = expected_projection_satax(A, dist)
            lam = lambda_min_plus(EZ)
            w, V = np.linalg.eigh(EZ)
            v = V[:, np.argmin(np.where(w > 1e-12 * w[-1], w, np.inf))]
            Ad = pinv_exact(A)
            X0 = Ad + np.outer(v, rng.standard_normal(n + 2))
            c = monte_carlo_contraction(satax_step, A, X0, Ad, dist, 10_000, rng)
            assert abs(c - (1 - lam)) <= 0.05


class TestSaxasRate:
    def test_full_identity(self):
        rep = saxas_rate_bound(np.eye(2), full_sketch(2))
        assert rep.rho_bound == pytest.approx(0.0, abs=1e-12)
        assert rep.certified

    def test_kron_expectation(self, rng):
        A = random_sym_rank(3, 2, rng)
        dist = with_replacement_distribution(3, 2)
        ref = 0
        for p, s in zip(dist.probs, dist.samples):
            M = A @ s.materialize()
            Z = M @ np.linalg.pinv(M.T @ M) @ M.T
            ref = ref + p * np.kron(Z, Z)
        np.testing.assert_allclose(expected_kron_projection(A, dist), ref, atol=1e-12)

    def test_identity_with_replacement_monte_carlo(self, rng):
        A = np.eye(2)
        dist = with_replacement_distribution(2, 2)
        rep = saxas_rate_bound(A, dist)
        assert rep.rho_bound == pytest.approx(0.5)
        assert rep.rho_bound < 1 and rep.certified
        # slowest symmetric direction of E[Z kron Z] restricted to Range(A kron A)
        R0 = np.array([[0.0, 1.0], [1.0, 0.0]]) / np.sqrt(2)
        c = monte_carlo_contraction(saxas_step, A, np.eye(2) + R0, np.eye(2), dist, 10_000, rng)
        assert rep.rho_exact / 1.5 <= c <= rep.rho_exact * 1.5
        assert c <= rep.rho_bound * 1.05

    def test_exact_not_above_bound(self, rng):
        for n in (2, 3, 4):
            A = random_sym_rank(n, n - 1, rng)
            rep = saxas_rate_bound(A, with_replacement_distribution(n, 2))
            assert 0 <= rep.rho_exact <= rep.rho_bound + 1e-10 < 1 + 1e-10

    def test_cap(self):
        with pytest.raises(ValueError, match="analysis cap"):
            saxas_rate_bound(np.eye(13), singletons(13))


class TestCertificate:
    def test_full(self, rng):
        A = random_sym_rank(4, 4, rng)
        assert saxas_convergence_certificate(A, full_sketch(4).samples)

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_singletons_fail(self, rng, n):
        A = random_sym_rank(n, n, rng)
        assert not saxas_convergence_certificate(A, singletons(n).samples)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_pairs_with_replacement(self, rng, n):
        samples = with_replacement_distribution(n, 2).samples
        SS = stacked_kron_sketch(samples, n)
        assert SS.shape == (4 * n**2, n**2)
        assert np.linalg.matrix_rank(SS) == n**2
        for r in range(1, n + 1):
            assert saxas_convergence_certificate(random_sym_rank(n, r, rng), samples)

    def test_stack_matches_kron(self, rng):
        samples = [subset([0, 2], 3), with_replacement_distribution(3, 2).samples[5]]
        ref = np.vstack([np.kron(s.materialize().T, s.materialize().T) for s in samples])
        np.testing.assert_array_equal(stacked_kron_sketch(samples, 3), ref)
