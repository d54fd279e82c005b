"""Exhaustive-support global optimum, the verification oracle for solvers.

Feasible only at desk scale: every one of the ``2^d`` row supports is
solved exactly, so any local method's objective can be compared against
the true minimum.
"""

from itertools import combinations

import numpy as np

from .errors import ParameterError
from .objective import loss

__all__ = ["brute_force_oracle"]

_RIDGE = 1e-10


def brute_force_oracle(data, lam, max_d=12):
    """Globally minimize loss + lam * (nonzero row count) by enumeration.

    Supports are visited in order of increasing size (lexicographic within
    a size), keeping strict improvements, so objective ties resolve to the
    sparsest earliest support. Each restricted least-squares problem is
    solved by normal equations with a tiny ridge to break rank-deficient
    ties deterministically. Returns ``(weights, objective)``.
    """
    if lam < 0:
        raise ParameterError(f"regularization factor must be >= 0, got {lam}")
    d = data.feature_count
    if d > max_d:
        raise ParameterError(
            f"refusing exhaustive enumeration for d={d} > max_d={max_d}"
        )
    x = data.x_centered
    y = data.y_centered
    c = data.class_count
    best_weights = np.zeros((d, c))
    best_value = loss(best_weights, data)  # empty support
    for size in range(1, d + 1):
        for rows in combinations(range(d), size):
            xs = x[list(rows), :]
            gram = xs @ xs.T + _RIDGE * np.eye(size)
            ws = np.linalg.solve(gram, xs @ y.T)
            weights = np.zeros((d, c))
            weights[list(rows), :] = ws
            value = loss(weights, data) + lam * size
            if value < best_value:
                best_value = value
                best_weights = weights
    return best_weights, best_value
