"""Proximal-gradient solver for the convex row-norm-sum relaxation.

Replacing the row count by the sum of row norms gives the standard convex
surrogate. Its proximal map shrinks rows instead of keeping them intact,
so solutions are rarely exactly row-sparse; the solver exists as the
comparison point for that contrast and for timing.
"""

import numpy as np

from .errors import DivergenceError, ParameterError
from .objective import gradient, loss
from .thresholding import gradient_step

__all__ = ["row_soft_threshold", "l21_solve"]


def row_soft_threshold(stepped, tau):
    """Shrink each row's norm by ``tau``, zeroing rows at or below it."""
    if tau < 0:
        raise ParameterError(f"threshold must be >= 0, got {tau}")
    stepped = np.asarray(stepped, dtype=float)
    norms = np.sqrt(np.sum(stepped * stepped, axis=1))
    scale = np.zeros_like(norms)
    np.divide(norms - tau, norms, out=scale, where=norms > tau)
    return stepped * scale[:, None]


def _penalized(weights, lam, data):
    return loss(weights, data) + lam * float(
        np.sum(np.sqrt(np.sum(weights * weights, axis=1)))
    )


def l21_solve(data, lam, config):
    """Proximal gradient descent on the row-norm-sum regularized loss.

    Uses the same sufficient-decrease backtracking and stopping rule as the
    hard-threshold solvers (squared Frobenius change at most ``epsilon``),
    starting from zero weights, so timing comparisons are fair. ``lambda0``
    and ``path_steps`` in the config are ignored: this is a single solve.
    """
    if lam < 0:
        raise ParameterError(f"regularization factor must be >= 0, got {lam}")
    from .solver import resolve_config  # late import, avoids a cycle

    cfg = resolve_config(config, data)
    weights = np.zeros((data.feature_count, data.class_count))
    step_bound = cfg.L0
    phi = _penalized(weights, lam, data)
    for _ in range(cfg.max_inner_iterations):
        grad = gradient(weights, data)
        converged = False
        while True:
            candidate = row_soft_threshold(
                gradient_step(weights, grad, step_bound), lam / step_bound
            )
            phi_candidate = _penalized(candidate, lam, data)
            delta = weights - candidate
            step_sq = float(np.sum(delta * delta))
            decrease = phi - phi_candidate
            if decrease >= 0.5 * cfg.eta * step_sq:
                break
            if step_sq <= cfg.epsilon:
                # same noise handling as the hard-threshold line search:
                # sub-tolerance steps must not increase the objective
                converged = decrease < 0.0
                break
            step_bound *= cfg.gamma
            if step_bound > cfg.max_L:
                raise DivergenceError(
                    f"step-size parameter exceeded its cap: lam={lam:.6g}, "
                    f"L={step_bound:.6g} > max_L={cfg.max_L:.6g}, "
                    f"objective={phi:.6g}"
                )
        if converged:
            break
        weights = candidate
        phi = phi_candidate
        if step_sq <= cfg.epsilon:
            break
    return weights
