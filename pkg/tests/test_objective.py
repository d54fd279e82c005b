import numpy as np
import pytest

from sparsefs import (
    CenteredData,
    Dataset,
    ParameterError,
    ShapeError,
    center,
    gradient,
    loss,
    objective_value,
    one_hot_encode,
    recover_bias,
    row_norms,
    spectral_bound,
    support,
)


def plain_data(x, y):
    """CenteredData wrapper for hand-built (not necessarily mean-free) inputs."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return CenteredData(x, y, np.zeros(x.shape[0]), np.zeros(y.shape[0]))


def random_instance(d, n, c, seed):
    rng = np.random.default_rng(seed)
    return plain_data(rng.standard_normal((d, n)), rng.standard_normal((c, n))), rng


def loop_loss(weights, data):
    """Triple-loop oracle for the half squared residual."""
    d, n = data.x_centered.shape
    c = data.y_centered.shape[0]
    total = 0.0
    for i in range(c):
        for j in range(n):
            r = -data.y_centered[i, j]
            for k in range(d):
                r += weights[k, i] * data.x_centered[k, j]
            total += r * r
    return 0.5 * total


class TestLoss:
    def test_zero_weights(self):
        data, _ = random_instance(3, 5, 2, seed=0)
        assert loss(np.zeros((3, 2)), data) == pytest.approx(
            0.5 * np.sum(data.y_centered**2)
        )

    def test_exact_fit(self):
        w = np.array([[1.0, -2.0], [0.5, 3.0]])
        data = plain_data(np.eye(2), w.T)
        assert loss(w, data) == 0.0

    def test_matches_triple_loop(self):
        data, rng = random_instance(3, 4, 2, seed=1)
        w = rng.standard_normal((3, 2))
        assert loss(w, data) == pytest.approx(loop_loss(w, data), rel=1e-12)

    def test_shape_error_reports_both_shapes(self):
        data, _ = random_instance(3, 4, 2, seed=2)
        with pytest.raises(ShapeError, match=r"\(2, 2\).*d=3"):
            loss(np.zeros((2, 2)), data)

    def test_convexity_midpoint(self):
        data, rng = random_instance(4, 7, 3, seed=3)
        for _ in range(20):
            w1 = rng.standard_normal((4, 3))
            w2 = rng.standard_normal((4, 3))
            mid = loss(0.5 * (w1 + w2), data)
            assert mid <= 0.5 * loss(w1, data) + 0.5 * loss(w2, data) + 1e-12


class TestGradient:
    def test_identity_design_zero_target(self):
        data = plain_data(np.eye(3), np.zeros((2, 3)))
        w = np.arange(6, dtype=float).reshape(3, 2)
        np.testing.assert_allclose(gradient(w, data), w)

    def test_zero_weights_gives_affine_term(self):
        data, _ = random_instance(4, 6, 2, seed=4)
        expected = -data.x_centered @ data.y_centered.T
        np.testing.assert_allclose(gradient(np.zeros((4, 2)), data), expected)

    def test_matches_central_differences(self):
        data, rng = random_instance(5, 8, 3, seed=5)
        w = rng.standard_normal((5, 3))
        grad = gradient(w, data)
        for i in range(5):
            for j in range(3):
                h = 1e-6 * max(1.0, abs(w[i, j]))
                bump = np.zeros_like(w)
                bump[i, j] = h
                fd = (loss(w + bump, data) - loss(w - bump, data)) / (2 * h)
                assert abs(fd - grad[i, j]) <= 1e-5 * max(1.0, abs(grad[i, j]))


class TestObjectiveValue:
    def test_zero_weights_any_lambda(self):
        data, _ = random_instance(3, 5, 2, seed=6)
        w = np.zeros((3, 2))
        assert objective_value(w, 3.7, data) == loss(w, data)

    def test_counts_nonzero_rows(self):
        data, _ = random_instance(4, 5, 2, seed=7)
        w = np.zeros((4, 2))
        w[1] = (1.0, 2.0)
        w[3] = (0.5, 0.0)
        assert objective_value(w, 0.5, data) == pytest.approx(loss(w, data) + 1.0)

    def test_negative_lambda_rejected(self):
        data, _ = random_instance(3, 5, 2, seed=8)
        with pytest.raises(ParameterError):
            objective_value(np.zeros((3, 2)), -0.1, data)

    def test_lambda_monotonicity_gap(self):
        data, rng = random_instance(4, 6, 2, seed=9)
        w = rng.standard_normal((4, 2))
        w[2] = 0.0
        lam_hi, lam_lo = 1.3, 0.4
        gap = objective_value(w, lam_hi, data) - objective_value(w, lam_lo, data)
        assert gap == pytest.approx((lam_hi - lam_lo) * 3, rel=1e-12)


class TestSupport:
    def test_exact_zero_rows_only(self):
        w = np.array([[0.0, 0.0], [1e-300, 0.0], [0.0, 0.0]])
        assert support(w) == (2,)


class TestRecoverBias:
    def test_zero_weights_gives_class_proportions(self):
        ds = Dataset(np.zeros((1, 2)) + [[1.0, 2.0]], [1, 2], class_count=2)
        y = one_hot_encode(ds.labels, 2)
        np.testing.assert_allclose(
            recover_bias(np.zeros((1, 2)), ds, y), [0.5, 0.5]
        )

    def test_recovers_exact_bias(self):
        rng = np.random.default_rng(10)
        w = rng.standard_normal((3, 2))
        bias = rng.standard_normal(2)
        x = rng.standard_normal((3, 6))
        y = w.T @ x + bias[:, None]
        ds = Dataset(x, [1, 2, 1, 2, 1, 2], class_count=2)
        np.testing.assert_allclose(recover_bias(w, ds, y), bias, atol=1e-12)

    def test_stationarity_by_finite_differences(self):
        rng = np.random.default_rng(11)
        w = rng.standard_normal((4, 3))
        ds = Dataset(rng.standard_normal((4, 9)),
                     [1, 2, 3, 1, 2, 3, 1, 2, 3], class_count=3)
        y = one_hot_encode(ds.labels, 3)
        bias = recover_bias(w, ds, y)

        def uncentered(b):
            r = w.T @ ds.features + b[:, None] - y
            return 0.5 * np.sum(r * r)

        scale = max(1.0, uncentered(bias))
        fd = np.zeros(3)
        for i in range(3):
            h = 1e-6
            bump = np.zeros(3)
            bump[i] = h
            fd[i] = (uncentered(bias + bump) - uncentered(bias - bump)) / (2 * h)
        assert np.linalg.norm(fd) < 1e-6 * scale


class TestSpectralBound:
    def test_diagonal_case(self):
        data = plain_data(np.diag([3.0, 1.0]), np.zeros((1, 2)))
        bound = spectral_bound(data)
        assert 9.0 <= bound <= 9.09

    def test_zero_data_floor(self):
        data = plain_data(np.zeros((3, 4)), np.zeros((2, 4)))
        assert spectral_bound(data) == 1e-12

    def test_dominates_dense_eigensolver(self):
        rng = np.random.default_rng(12)
        for seed in range(5):
            x = np.random.default_rng(seed).standard_normal((6, 10))
            data = plain_data(x, np.zeros((2, 10)))
            top = np.linalg.eigvalsh(x @ x.T).max()
            bound = spectral_bound(data)
            assert 1.0 <= bound / top <= 1.02
        del rng

    def test_centered_objective_matches_uncentered_with_optimal_bias(self):
        rng = np.random.default_rng(13)
        ds = Dataset(rng.standard_normal((4, 8)),
                     [1, 2, 1, 2, 1, 2, 1, 2], class_count=2)
        y = one_hot_encode(ds.labels, 2)
        w = rng.standard_normal((4, 2))
        bias = recover_bias(w, ds, y)
        r = w.T @ ds.features + bias[:, None] - y
        uncentered = 0.5 * np.sum(r * r)
        centered = loss(w, center(ds))
        assert uncentered == pytest.approx(centered, rel=1e-9)


class TestRowNorms:
    def test_pythagorean(self):
        assert row_norms(np.array([[3.0, 4.0]]))[0] == 5.0

    def test_zero_matrix(self):
        np.testing.assert_array_equal(row_norms(np.zeros((3, 2))), np.zeros(3))

    def test_matches_row_loops(self):
        rng = np.random.default_rng(14)
        w = rng.standard_normal((6, 3))
        expected = [np.sqrt(sum(v * v for v in row)) for row in w]
        np.testing.assert_allclose(row_norms(w), expected, rtol=1e-12)
