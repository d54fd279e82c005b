"""Row-separable hard-threshold machinery.

One update is a gradient step followed by a per-row keep-or-zero decision:
row ``g`` of the stepped matrix survives exactly when ``||g||^2 > 2*lam/L``.
Kept rows are copied bitwise, dropped rows are written as exact zeros; there
is no shrinkage, which is what separates this operator from the group soft
threshold in :mod:`sparsefs.baseline`.
"""

import numpy as np

from .errors import DataError, ParameterError, ShapeError
from .objective import gradient

__all__ = ["gradient_step", "row_hard_threshold", "iht_update"]


def gradient_step(weights, grad, step_bound):
    """``W - grad / L`` for step-size parameter ``L > 0``."""
    if step_bound <= 0:
        raise ParameterError(f"L must be > 0, got {step_bound}")
    weights = np.asarray(weights, dtype=float)
    grad = np.asarray(grad, dtype=float)
    if grad.shape != weights.shape:
        raise ShapeError(f"gradient shape {grad.shape} != weights shape {weights.shape}")
    return weights - grad / step_bound

def row_hard_threshold(stepped, lam, step_bound):
    """Zero every row whose squared norm is at most ``2*lam/L``.

    Ties go to the zero branch: at equality both candidate rows achieve the
    same subproblem value and the sparser one is preferred.
    """
    if lam < 0:
        raise ParameterError(f"regularization factor must be >= 0, got {lam}")
    if step_bound <= 0:
        raise ParameterError(f"L must be > 0, got {step_bound}")
    stepped = np.asarray(stepped, dtype=float)
    if not np.all(np.isfinite(stepped)):
        raise DataError("non-finite entries in thresholding input; "
                        "step size likely diverged upstream")
    keep = np.sum(stepped * stepped, axis=1) > (2.0 * lam) / step_bound
    out = np.zeros_like(stepped)
    out[keep] = stepped[keep]
    return out


def iht_update(weights, lam, step_bound, data):
    """One hard-thresholded gradient step on the centered data."""
    stepped = gradient_step(weights, gradient(weights, data), step_bound)
    return row_hard_threshold(stepped, lam, step_bound)
