"""Least-squares loss, gradient, row-counting objective and related pieces.

A weight matrix ``W`` is a plain ``d x C`` ndarray. Its support is the set
of rows with nonzero Euclidean norm, compared against exact zero: the hard
threshold operator writes zeroed rows as literal zeros, so no epsilon is
involved in counting selected features.
"""

import numpy as np

from .errors import ParameterError, ShapeError

__all__ = [
    "loss",
    "gradient",
    "objective_value",
    "support",
    "recover_bias",
    "spectral_bound",
    "row_norms",
]


def _check_shapes(weights, data):
    d, n = data.x_centered.shape
    c = data.y_centered.shape[0]
    if weights.shape != (d, c):
        raise ShapeError(
            f"weights shape {weights.shape} does not match data "
            f"(d={d}, C={c}, N={n})"
        )


def loss(weights, data):
    """Half the squared Frobenius residual of ``W^T X - Y``."""
    weights = np.asarray(weights, dtype=float)
    _check_shapes(weights, data)
    residual = weights.T @ data.x_centered - data.y_centered
    return 0.5 * float(np.sum(residual * residual))


def gradient(weights, data):
    """Gradient of :func:`loss` at ``W``.

    Evaluated as ``X (X^T W - Y^T)`` so the d x d Gram matrix is never
    formed; with many more features than samples that ordering is the
    cheap one.
    """
    weights = np.asarray(weights, dtype=float)
    _check_shapes(weights, data)
    x = data.x_centered
    return x @ (x.T @ weights - data.y_centered.T)


def support(weights):
    """Sorted 1-based indices of rows with nonzero norm."""
    weights = np.asarray(weights)
    return tuple(int(i) + 1 for i in np.nonzero(np.any(weights != 0.0, axis=1))[0])


def objective_value(weights, lam, data):
    """Loss plus ``lam`` times the number of nonzero rows."""
    if lam < 0:
        raise ParameterError(f"regularization factor must be >= 0, got {lam}")
    weights = np.asarray(weights, dtype=float)
    nonzero_rows = int(np.count_nonzero(np.any(weights != 0.0, axis=1)))
    return loss(weights, data) + lam * nonzero_rows


def recover_bias(weights, dataset, label_matrix):
    """Optimal intercept for the uncentered least-squares fit.

    Returns the row means of ``Y - W^T X``; the uncentered objective is
    stationary in the bias at this value.
    """
    weights = np.asarray(weights, dtype=float)
    x = dataset.features
    y = np.asarray(label_matrix, dtype=float)
    if weights.shape != (x.shape[0], y.shape[0]) or y.shape[1] != x.shape[1]:
        raise ShapeError(
            f"weights {weights.shape}, features {x.shape}, labels {y.shape} disagree"
        )
    return (y - weights.T @ x).mean(axis=1)


def spectral_bound(data, tolerance=1e-6, max_iterations=500, seed=0):
    """Upper bound on the largest eigenvalue of ``X X^T`` by power iteration.

    Power iteration converges from below, so the estimate is inflated by
    1.01; all-zero data gets a floor of 1e-12 to keep step sizes finite.
    """
    if tolerance <= 0:
        raise ParameterError(f"tolerance must be > 0, got {tolerance}")
    x = data.x_centered
    d = x.shape[0]
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(d)
    norm = np.linalg.norm(v)
    if norm == 0.0:  # unreachable for a continuous draw, kept for safety
        v = np.ones(d)
        norm = np.linalg.norm(v)
    v /= norm
    estimate = 0.0
    for _ in range(max_iterations):
        w = x @ (x.T @ v)
        new_estimate = float(v @ w)
        w_norm = np.linalg.norm(w)
        if w_norm == 0.0:
            estimate = 0.0
            break
        v = w / w_norm
        if abs(new_estimate - estimate) <= tolerance * max(abs(new_estimate), 1e-30):
            estimate = new_estimate
            break
        estimate = new_estimate
    return max(1.01 * estimate, 1e-12)


def row_norms(weights):
    """Euclidean norm of each row; the usual feature-ranking score."""
    weights = np.asarray(weights, dtype=float)
    return np.sqrt(np.sum(weights * weights, axis=1))
