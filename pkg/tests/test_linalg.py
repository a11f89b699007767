import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from breakmetrics.errors import (
    BandwidthTooLarge,
    DimensionMismatch,
    NotPositiveDefinite,
    RankDeficient,
)
from breakmetrics.linalg import (
    generalized_eigen,
    information_criteria,
    long_run_covariance,
    newey_west_bandwidth,
    ols_fit,
)


class TestOlsFit:
    def test_exact_fit_single_column(self):
        fit = ols_fit([1.0, 2.0, 3.0], np.array([[1.0], [2.0], [3.0]]))
        assert fit.coefficients[0] == pytest.approx(1.0, abs=1e-12)
        assert fit.ssr == pytest.approx(0.0, abs=1e-20)

    def test_intercept_only_returns_mean(self):
        fit = ols_fit([2.0, 2.0, 2.0], np.ones((3, 1)))
        assert fit.coefficients[0] == pytest.approx(2.0, abs=1e-12)

    def test_two_column_normal_equation_oracle(self):
        # Hand solve of X'X b = X'y for X = [1, (0,1,2,3)], y = (1,2,2,4):
        # X'X = [[4,6],[6,14]], X'y = [9,18], det = 20
        # b = ((14*9 - 6*18)/20, (-6*9 + 4*18)/20) = (0.9, 0.9)
        y = np.array([1.0, 2.0, 2.0, 4.0])
        X = np.column_stack([np.ones(4), np.arange(4.0)])
        fit = ols_fit(y, X)
        np.testing.assert_allclose(fit.coefficients, [0.9, 0.9], atol=1e-12)
        # residual bookkeeping
        np.testing.assert_allclose(fit.fitted + fit.residuals, y, atol=1e-12)
        assert fit.sigma2 == pytest.approx(fit.ssr / (4 - 2))

    def test_duplicate_column_raises_rank_deficient(self):
        x = np.arange(1.0, 9.0)
        X = np.column_stack([np.ones(8), x, 2.0 * x])
        with pytest.raises(RankDeficient):
            ols_fit(np.arange(8.0), X)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            ols_fit([1.0, 2.0], np.ones((3, 1)))

    @given(st.integers(min_value=0, max_value=10_000))
    @settings(max_examples=25, deadline=None)
    def test_regressor_residual_orthogonality(self, seed):
        rng = np.random.default_rng(seed)
        T, k = 30, 4
        X = rng.normal(size=(T, k))
        y = rng.normal(size=T)
        fit = ols_fit(y, X)
        scale = np.linalg.norm(X) * np.linalg.norm(y)
        assert np.max(np.abs(X.T @ fit.residuals)) <= 1e-8 * max(scale, 1.0)


class TestLongRunCovariance:
    def test_bandwidth_zero_is_second_moment(self):
        rng = np.random.default_rng(3)
        U = rng.normal(size=(40, 2))
        lrc = long_run_covariance(U, bandwidth=0)
        np.testing.assert_allclose(lrc.omega, U.T @ U / 40, atol=1e-12)
        np.testing.assert_allclose(lrc.lambda_one_sided, U.T @ U / 40, atol=1e-12)

    def test_alternating_series_hand_sum(self):
        # Gamma_0 = 1, Gamma_1 = -3/4, w_1 = 1/2:
        # omega = 1 + 2 * (1/2) * (-3/4) = 0.25
        U = np.array([1.0, -1.0, 1.0, -1.0])
        lrc = long_run_covariance(U, bandwidth=1)
        assert lrc.omega[0, 0] == pytest.approx(0.25, abs=1e-12)
        assert lrc.lambda_one_sided[0, 0] == pytest.approx(1.0 - 0.375, abs=1e-12)

    def test_iid_large_sample_matches_population_variance(self):
        rng = np.random.default_rng(12345)
        sigma = 1.7
        U = rng.normal(scale=sigma, size=(10_000, 1))
        lrc = long_run_covariance(U)
        assert lrc.omega[0, 0] == pytest.approx(sigma**2, rel=0.05)

    def test_omega_symmetric_psd(self):
        rng = np.random.default_rng(9)
        U = rng.normal(size=(60, 3)) @ rng.normal(size=(3, 3))
        lrc = long_run_covariance(U, bandwidth=4)
        np.testing.assert_allclose(lrc.omega, lrc.omega.T, atol=1e-10)
        assert np.linalg.eigvalsh(lrc.omega).min() >= -1e-8

    def test_bandwidth_too_large(self):
        with pytest.raises(BandwidthTooLarge):
            long_run_covariance(np.ones((5, 1)) + np.arange(5)[:, None], bandwidth=5)

    def test_default_bandwidth_rule(self):
        assert newey_west_bandwidth(100) == 4
        assert newey_west_bandwidth(43) == int(np.floor(4 * (43 / 100) ** (2 / 9)))


class TestGeneralizedEigen:
    def test_identity_b_reduces_to_ordinary_eigenvalues(self):
        A = np.array([[3.0, 1.0], [1.0, 2.0]])
        vals = generalized_eigen(A, np.eye(2))
        np.testing.assert_allclose(vals, np.linalg.eigvalsh(A)[::-1], atol=1e-12)

    def test_equal_pencil_gives_unit_eigenvalues(self):
        A = np.array([[2.0, 0.4], [0.4, 1.0]])
        np.testing.assert_allclose(generalized_eigen(A, A), [1.0, 1.0], atol=1e-12)

    def test_two_by_two_quadratic_formula_oracle(self):
        A = np.array([[2.0, 1.0], [1.0, 3.0]])
        B = np.array([[1.0, 0.3], [0.3, 2.0]])
        # det(A - lam B) = (2-lam)(3-2lam) - (1-0.3lam)^2
        #               = 1.91 lam^2 - 6.4 lam + 5
        a, b, c = 1.91, -6.4, 5.0
        disc = np.sqrt(b * b - 4 * a * c)
        roots = sorted([(-b + disc) / (2 * a), (-b - disc) / (2 * a)], reverse=True)
        np.testing.assert_allclose(generalized_eigen(A, B), roots, atol=1e-12)

    def test_not_positive_definite(self):
        A = np.eye(2)
        B = np.array([[1.0, 0.0], [0.0, -1.0]])
        with pytest.raises(NotPositiveDefinite):
            generalized_eigen(A, B)

    @given(st.integers(min_value=0, max_value=10_000))
    @settings(max_examples=25, deadline=None)
    def test_congruence_scaling_invariance(self, seed):
        rng = np.random.default_rng(seed)
        M = rng.normal(size=(3, 3))
        A = M @ M.T
        N = rng.normal(size=(3, 3))
        B = N @ N.T + 3.0 * np.eye(3)
        c = 10.0 ** rng.uniform(-2, 2)
        np.testing.assert_allclose(
            generalized_eigen(c * A, c * B), generalized_eigen(A, B), atol=1e-10, rtol=1e-10
        )


class TestInformationCriteria:
    def test_unit_variance_case(self):
        ic = information_criteria(ssr=50.0, T=50, k=1)
        assert ic.aic == pytest.approx(2.0, abs=1e-12)
        assert ic.bic == pytest.approx(np.log(50.0), abs=1e-12)

    def test_monotone_penalty_prefers_smaller_k(self):
        small = information_criteria(ssr=10.0, T=40, k=1)
        big = information_criteria(ssr=10.0, T=40, k=2)
        assert small.aic < big.aic
        assert small.bic < big.bic
        assert small.hq < big.hq

    def test_calculator_oracle(self):
        ic = information_criteria(ssr=np.e**2, T=2, k=1)
        assert ic.aic == pytest.approx(2.0 * np.log(np.e**2 / 2.0) + 2.0, abs=1e-12)

    def test_degenerate_zero_ssr(self):
        ic = information_criteria(ssr=0.0, T=10, k=1)
        assert ic.degenerate
        assert ic.aic == -np.inf and ic.bic == -np.inf and ic.hq == -np.inf
