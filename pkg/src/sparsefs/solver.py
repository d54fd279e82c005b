"""Homotopy solvers for the row-counting regularized least-squares problem.

Both solvers sweep a geometric ladder of regularization factors
``lam_k = lambda0 * rho**k``, warm-starting each solve (weights and the
step-size parameter ``L``) from the previous one and recording one
:class:`PathPoint` per ladder value. :func:`hiht_solve` iterates each
subproblem to a fixed-point tolerance; :func:`ahiht_solve` spends exactly
one update per ladder value, which is far cheaper and usually lands on the
same supports.

Every update passes a sufficient-decrease test: ``L`` is inflated by
``gamma`` until the objective drop is at least ``(eta/2)`` times the squared
step length. Objective traces are therefore nonincreasing within each
ladder value by construction.
"""

import time
from dataclasses import dataclass, replace

import numpy as np

from .errors import DivergenceError, ParameterError
from .objective import gradient, objective_value, spectral_bound, support
from .thresholding import gradient_step, row_hard_threshold

__all__ = [
    "SolverConfig",
    "PathPoint",
    "RegularizationPath",
    "resolve_config",
    "line_search_update",
    "hiht_solve",
    "ahiht_solve",
    "select_by_count",
]


@dataclass(frozen=True)
class SolverConfig:
    """Homotopy and line-search hyperparameters.

    ``lambda0``, ``L0`` and ``max_L`` may be ``None`` ("auto"); see
    :func:`resolve_config` for how they are filled from the data. ``seed``
    only affects the power-iteration start vector used for the automatic
    ``L0``.
    """

    lambda0: float | None = None
    rho: float = 0.7
    gamma: float = 2.0
    eta: float = 1e-4
    epsilon: float = 1e-6
    L0: float | None = None
    path_steps: int = 30
    max_inner_iterations: int = 1000
    max_L: float | None = None
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.rho < 1.0:
            raise ParameterError(f"rho must be in (0, 1), got {self.rho}")
        if self.gamma <= 1.0:
            raise ParameterError(f"gamma must be > 1, got {self.gamma}")
        if self.eta <= 0.0:
            raise ParameterError(f"eta must be > 0, got {self.eta}")
        if self.epsilon <= 0.0:
            raise ParameterError(f"epsilon must be > 0, got {self.epsilon}")
        if self.path_steps < 1:
            raise ParameterError(f"path_steps must be >= 1, got {self.path_steps}")
        if self.max_inner_iterations < 1:
            raise ParameterError(
                f"max_inner_iterations must be >= 1, got {self.max_inner_iterations}"
            )
        if self.lambda0 is not None and self.lambda0 <= 0:
            raise ParameterError(f"lambda0 must be > 0, got {self.lambda0}")
        if self.L0 is not None and self.L0 <= 0:
            raise ParameterError(f"L0 must be > 0, got {self.L0}")
        if self.max_L is not None and self.max_L <= 0:
            raise ParameterError(f"max_L must be > 0, got {self.max_L}")


@dataclass(frozen=True, eq=False)
class PathPoint:
    """Converged state for one regularization value.

    ``objective_trace`` holds the objective at the warm start followed by
    every accepted update, so ``objective_trace[-1] == objective``.
    ``truncated`` is set when the inner loop stopped before reaching the
    fixed-point tolerance (iteration cap, or the single accelerated update).
    """

    lam: float
    weights: np.ndarray
    bias: np.ndarray
    objective: float
    support: tuple[int, ...]
    support_size: int
    inner_iterations: int
    final_L: float
    truncated: bool
    objective_trace: tuple[float, ...]


@dataclass(frozen=True, eq=False)
class RegularizationPath:
    points: tuple[PathPoint, ...]
    total_iht_updates: int
    wall_time: float


def resolve_config(config, data):
    """Fill the auto fields of a :class:`SolverConfig` from the data.

    ``L0`` defaults to a tenth of the spectral bound, so the first updates
    take aggressive steps and the line search inflates as needed.
    ``lambda0`` defaults to the smallest value at which a first update from
    zero weights keeps every row excluded, i.e. the ladder starts at the
    empty model. ``max_L`` defaults to ``1e12 * L0``.
    """
    l0 = config.L0
    if l0 is None:
        l0 = 0.1 * spectral_bound(data, seed=config.seed)
    lambda0 = config.lambda0
    if lambda0 is None:
        grad0 = gradient(np.zeros((data.feature_count, data.class_count)), data)
        max_sq = float(np.max(np.sum(grad0 * grad0, axis=1)))
        # all-zero gradient (degenerate targets): floor keeps the ladder valid
        lambda0 = max(max_sq / (2.0 * l0), np.finfo(float).tiny)
    max_l = config.max_L
    if max_l is None:
        max_l = 1e12 * l0
    return replace(config, lambda0=lambda0, L0=l0, max_L=max_l)


def _search(weights, phi, lam, step_bound, config, data):
    """One accepted update; inflates L until sufficient decrease holds.

    Returns ``(new_weights, L, new_phi, candidates_tried, moved)``. The
    gradient is evaluated once: candidates for successive L values differ
    only in the step and threshold.

    Candidates whose step is already below the inner stopping tolerance
    get special treatment: accepted if they do not increase the objective,
    otherwise the input is declared converged and returned unchanged
    (``moved`` False). In that regime the true decrease drowns in rounding
    error, and inflating L only shrinks the step further until it
    underflows into a bitwise fixed point; the bloated L would then block
    features from entering at every later ladder value.
    """
    grad = gradient(weights, data)
    tried = 0
    while True:
        candidate = row_hard_threshold(
            gradient_step(weights, grad, step_bound), lam, step_bound
        )
        tried += 1
        phi_candidate = objective_value(candidate, lam, data)
        delta = weights - candidate
        step_sq = float(np.sum(delta * delta))
        decrease = phi - phi_candidate
        if decrease >= 0.5 * config.eta * step_sq:
            return candidate, step_bound, phi_candidate, tried, True
        if step_sq <= config.epsilon:
            if decrease >= 0.0:
                return candidate, step_bound, phi_candidate, tried, True
            return weights, step_bound, phi, tried, False
        step_bound *= config.gamma
        if step_bound > config.max_L:
            raise DivergenceError(
                f"step-size parameter exceeded its cap: lam={lam:.6g}, "
                f"L={step_bound:.6g} > max_L={config.max_L:.6g}, "
                f"objective={phi:.6g}"
            )


def line_search_update(weights, lam, step_bound, config, data):
    """Single sufficient-decrease update; returns ``(weights, final_L)``.

    ``final_L`` is the first ``gamma``-multiple of the input at which the
    thresholded step decreases the objective by at least ``(eta/2)`` times
    the squared step length (steps already below the ``epsilon`` stopping
    tolerance only need to not increase it). A fixed point is accepted
    immediately, both sides of the test being zero; inputs within the
    stopping tolerance of one are returned unchanged.
    """
    weights = np.asarray(weights, dtype=float)
    if step_bound <= 0:
        raise ParameterError(f"L must be > 0, got {step_bound}")
    phi = objective_value(weights, lam, data)
    new_weights, final_l, _, _, _ = _search(weights, phi, lam, step_bound, config, data)
    return new_weights, final_l


def _solve_path(data, config, single_update):
    cfg = resolve_config(config, data)
    start = time.perf_counter()
    weights = np.zeros((data.feature_count, data.class_count))
    step_bound = cfg.L0
    points = []
    total_updates = 0
    for k in range(cfg.path_steps):
        lam = cfg.lambda0 * cfg.rho**k
        phi = objective_value(weights, lam, data)
        trace = [phi]
        inner = 0
        truncated = False
        while True:
            new_weights, step_bound, phi, tried, moved = _search(
                weights, phi, lam, step_bound, cfg, data
            )
            total_updates += tried
            inner += 1
            if not moved:  # converged in place
                break
            delta = weights - new_weights
            settled = float(np.sum(delta * delta)) <= cfg.epsilon
            weights = new_weights
            trace.append(phi)
            if single_update:
                truncated = not settled
                break
            if settled:
                break
            if inner >= cfg.max_inner_iterations:
                truncated = True
                break
        sup = support(weights)
        points.append(
            PathPoint(
                lam=lam,
                weights=weights.copy(),
                bias=data.y_mean - weights.T @ data.x_mean,
                objective=phi,
                support=sup,
                support_size=len(sup),
                inner_iterations=inner,
                final_L=step_bound,
                truncated=truncated,
                objective_trace=tuple(trace),
            )
        )
    return RegularizationPath(
        points=tuple(points),
        total_iht_updates=total_updates,
        wall_time=time.perf_counter() - start,
    )


def hiht_solve(data, config=None):
    """Full homotopy solve: iterate each ladder value to its fixed point.

    The inner loop repeats line-search updates until the squared Frobenius
    change drops to ``epsilon``; hitting ``max_inner_iterations`` first
    marks the point truncated rather than failing, so long tails at tiny
    regularization cannot kill a sweep.
    """
    return _solve_path(data, config or SolverConfig(), single_update=False)


def ahiht_solve(data, config=None):
    """Accelerated sweep: exactly one line-search update per ladder value."""
    return _solve_path(data, config or SolverConfig(), single_update=True)


def select_by_count(path, target):
    """Path point whose support size is closest to ``target``.

    Ties prefer the smaller support, then the larger regularization value,
    so re-tuning the feature count never requires another solve.
    """
    if target < 1:
        raise ParameterError(f"target feature count must be >= 1, got {target}")
    if not path.points:
        raise ParameterError("cannot select from an empty path")
    return min(
        path.points,
        key=lambda p: (abs(p.support_size - target), p.support_size, -p.lam),
    )
