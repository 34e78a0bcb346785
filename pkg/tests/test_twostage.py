import numpy as np
import pytest

from conftest import exact_moment_design
from dynotears.exceptions import InvalidInputError
from dynotears.graphgen import GraphSpec, random_dag_weights, random_inter_weights
from dynotears.sem import build_lagged_design, simulate
from dynotears.solver import SolverConfig
from dynotears.twostage import (
    UNDERDETERMINED,
    estimate_intra_from_residuals,
    fit_reduced_var,
    fit_two_stage,
    recover_inter,
)


def reduced_form(W, A):
    return A @ np.linalg.inv(np.eye(W.shape[0]) - W)


class TestReducedVar:
    def test_noiseless_exact(self, rng):
        Y = rng.standard_normal((200, 6))
        B = rng.standard_normal((6, 3))
        var = fit_reduced_var(Y @ B, Y)
        np.testing.assert_allclose(var.B, B, atol=1e-8)
        assert np.abs(var.residuals).max() <= 1e-8
        assert var.rank == 6 and not var.warnings

    def test_no_lags(self, rng):
        X = rng.standard_normal((10, 3))
        var = fit_reduced_var(X, np.zeros((10, 0)))
        assert var.B.shape == (0, 3)
        np.testing.assert_array_equal(var.residuals, X)

    def test_simulated(self):
        # the 0.1 tolerance is roughly two standard errors of the largest entry at n = 500
        W = np.array([[0.0, 0.5], [0.0, 0.0]])
        A = np.array([[0.4, 0.0], [-0.3, 0.3]])
        design = build_lagged_design(simulate(W, A, 1, 500, rng=np.random.default_rng(0)), 1)
        var = fit_reduced_var(design.X, design.Y)
        assert np.abs(var.B - reduced_form(W, A)).max() <= 0.1

    def test_residuals_orthogonal_to_lags(self, rng):
        X, Y = rng.standard_normal((100, 4)), rng.standard_normal((100, 8))
        var = fit_reduced_var(X, Y)
        assert np.abs(Y.T @ var.residuals).max() <= 1e-8

    def test_underdetermined_warning(self, rng):
        var = fit_reduced_var(rng.standard_normal((20, 25)), rng.standard_normal((20, 25)))
        assert UNDERDETERMINED in var.warnings
        assert np.abs(var.residuals).max() <= 1e-8


class TestStages:
    def test_noise_only_residuals(self):
        empty = 0
        for seed in range(5):
            e = np.random.default_rng(seed).standard_normal((500, 5))
            res = estimate_intra_from_residuals(e, lambda_w=0.2, config=SolverConfig(tau_w=0.3))
            empty += not res.W.any()
        assert empty >= 4

    def test_chain_residuals(self):
        rng = np.random.default_rng(0)
        e = rng.standard_normal((1000, 2))
        e[:, 1] += 1.5 * e[:, 0]
        res = estimate_intra_from_residuals(e)
        assert np.count_nonzero(res.W) == 1
        assert res.W[0, 1] == pytest.approx(1.5, abs=0.2)

    def test_zero_residuals(self):
        res = estimate_intra_from_residuals(np.zeros((20, 4)))
        assert not res.W.any() and res.converged

    def test_underdetermined_pipeline(self):
        rng = np.random.default_rng(1)
        X, Y = rng.standard_normal((20, 25)), rng.standard_normal((20, 25))
        res = fit_two_stage(X, Y, SolverConfig.from_preset("n50"))
        assert UNDERDETERMINED in res.warnings
        assert not res.W.any()

    def test_recover_inter(self, rng):
        B = rng.standard_normal((6, 3))
        np.testing.assert_array_equal(recover_inter(B, np.zeros((3, 3))), B)
        assert not recover_inter(np.zeros((6, 3)), np.triu(np.ones((3, 3)), 1)).any()
        W = np.triu(rng.uniform(-2, 2, (3, 3)), 1)
        A = rng.standard_normal((6, 3))
        np.testing.assert_allclose(recover_inter(reduced_form(W, A), W), A, atol=1e-10)
        with pytest.raises(InvalidInputError):
            recover_inter(np.zeros((5, 3)), np.zeros((3, 3)))


class TestPipeline:
    def test_noiseless_exact_recovery(self, rng):
        # without noise the residuals vanish, so the identifiable case is W = 0
        for d in (2, 3, 4):
            A = random_inter_weights(GraphSpec("ER", d=d, k=1, p=2, seed=d))
            Y = rng.standard_normal((300, 2 * d))
            res = fit_two_stage(Y @ A, Y, SolverConfig())
            assert not res.W.any()
            assert np.abs(res.A - A).max() <= 1e-6

    @pytest.mark.parametrize("seed,d", [(0, 3), (1, 4), (2, 4)])
    def test_exact_moment_recovery(self, seed, d):
        rng = np.random.default_rng(seed)
        W = random_dag_weights(GraphSpec("ER", d=d, k=2, seed=seed))
        A = random_inter_weights(GraphSpec("ER", d=d, k=1, p=2, seed=seed + 10))
        X, Y = exact_moment_design(W, A, 2000, rng)
        res = fit_two_stage(X, Y, SolverConfig(lambda_w=0.0, lambda_a=0.0))
        assert np.abs(res.W - W).max() <= 2e-2
        assert np.abs(res.A - A).max() <= 2e-2
