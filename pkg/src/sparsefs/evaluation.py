"""Classifier-based evaluation of selected features.

The experiment loop mirrors a common benchmark protocol: repeated
stratified 2/3 splits, feature learning on the training side only, then
nearest-neighbor and softmax accuracy on the held-out side for a grid of
feature-count targets.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from .baseline import l21_solve
from .data import Dataset, center, one_hot_encode, stratified_split
from .errors import DataError, DivergenceError, ParameterError, ShapeError
from .objective import row_norms
from .solver import SolverConfig, ahiht_solve, hiht_solve, select_by_count

__all__ = [
    "TrialResult",
    "ExperimentReport",
    "ExperimentGrids",
    "ClassifierConfig",
    "SoftmaxModel",
    "restrict_features",
    "knn_predict",
    "softmax_train",
    "softmax_predict",
    "accuracy",
    "run_experiment",
    "accuracy_curve",
]

DEFAULT_LAMBDA_GRID = tuple(10.0**e for e in range(-5, 1))
DEFAULT_FEATURE_COUNTS = tuple(range(20, 401, 20))


@dataclass(frozen=True)
class ExperimentGrids:
    """Parameter grids swept by :func:`run_experiment`.

    ``lambda_grid`` applies to the convex baseline only (the hard-threshold
    solvers sweep their own homotopy ladder); ``feature_counts`` is the
    grid of selected-feature targets.
    """

    lambda_grid: tuple[float, ...] = DEFAULT_LAMBDA_GRID
    feature_counts: tuple[int, ...] = DEFAULT_FEATURE_COUNTS


@dataclass(frozen=True)
class ClassifierConfig:
    ridge: float = 1e-4
    max_iterations: int = 2000
    gradient_tolerance: float = 1e-5
    initial_step: float = 1.0


@dataclass(frozen=True, eq=False)
class SoftmaxModel:
    weights: np.ndarray  # d x C
    bias: np.ndarray  # C
    class_count: int


@dataclass(frozen=True)
class TrialResult:
    method: str
    lambda_or_k: float
    selected_features: tuple[int, ...]
    accuracy: float
    train_seconds: float
    classifier: str
    trial_index: int
    target_count: int | None


@dataclass(frozen=True)
class ExperimentReport:
    dataset_name: str
    trials: tuple[TrialResult, ...]
    mean_accuracy: float
    accuracy_std: float
    mean_feature_count: float
    config: dict = field(compare=False)
    seeds: tuple[int, ...]


def restrict_features(features, selected):
    """Rows of ``features`` at the 1-based indices, in ascending order."""
    features = np.asarray(features)
    d = features.shape[0]
    selected = [int(i) for i in selected]
    if len(set(selected)) != len(selected):
        raise ParameterError("selected feature indices must be unique")
    for i in selected:
        if not 1 <= i <= d:
            raise ParameterError(f"feature index {i} outside 1..{d}")
    return features[np.array(sorted(selected)) - 1, :]


def knn_predict(train_features, train_labels, test_features, k):
    """Euclidean k-nearest-neighbor labels for each test column.

    Vote ties are broken by the largest summed inverse distance among the
    tied classes, then by the smallest class index.
    """
    train_features = np.asarray(train_features, dtype=float)
    test_features = np.asarray(test_features, dtype=float)
    train_labels = np.asarray(train_labels, dtype=int)
    n_train = train_features.shape[1]
    if k < 1:
        raise ParameterError(f"k must be >= 1, got {k}")
    if k > n_train:
        raise ParameterError(f"k={k} exceeds training size {n_train}")
    if train_features.shape[0] != test_features.shape[0]:
        raise ShapeError(
            f"feature counts disagree: train {train_features.shape[0]}, "
            f"test {test_features.shape[0]}"
        )
    class_count = int(train_labels.max())
    sq_train = np.sum(train_features * train_features, axis=0)
    sq_test = np.sum(test_features * test_features, axis=0)
    sq_dist = sq_test[:, None] + sq_train[None, :] - 2.0 * test_features.T @ train_features
    distances = np.sqrt(np.maximum(sq_dist, 0.0))
    predictions = np.empty(test_features.shape[1], dtype=int)
    for j in range(distances.shape[0]):
        nearest = np.argsort(distances[j], kind="stable")[:k]
        votes = np.bincount(train_labels[nearest], minlength=class_count + 1)[1:]
        best = votes.max()
        tied = np.nonzero(votes == best)[0] + 1
        if tied.size == 1:
            predictions[j] = tied[0]
            continue
        with np.errstate(divide="ignore"):
            inverse = 1.0 / distances[j][nearest]
        weight = np.array(
            [inverse[train_labels[nearest] == c].sum() for c in tied]
        )
        predictions[j] = tied[int(np.argmax(weight))]
    return predictions


def _scores(model, features):
    return model.weights.T @ features + model.bias[:, None]


def _softmax_objective(weights, bias, features, targets, ridge):
    scores = weights.T @ features + bias[:, None]
    scores = scores - scores.max(axis=0, keepdims=True)
    log_norm = np.log(np.sum(np.exp(scores), axis=0))
    n = features.shape[1]
    nll = float(np.sum(log_norm - np.sum(targets * scores, axis=0))) / n
    return nll + 0.5 * ridge * float(np.sum(weights * weights))


def softmax_train(train_features, train_labels, config=None, class_count=None):
    """Fit a multinomial logistic model by full-batch gradient descent.

    Deterministic recipe: zero start, ridge on the weights (bias free),
    step size that doubles on acceptance and halves until the cross-entropy
    stops increasing, stopping once the gradient norm falls below
    ``gradient_tolerance`` times its starting scale. Feature-free input
    (``d == 0``) degenerates to a bias-only majority-class model.
    """
    config = config or ClassifierConfig()
    train_features = np.asarray(train_features, dtype=float)
    train_labels = np.asarray(train_labels, dtype=int)
    if class_count is None:
        class_count = int(train_labels.max())
    if np.unique(train_labels).size < 2:
        raise DataError("softmax training needs at least 2 classes present")
    d, n = train_features.shape
    targets = one_hot_encode(train_labels, class_count)
    weights = np.zeros((d, class_count))
    bias = np.zeros(class_count)
    value = _softmax_objective(weights, bias, train_features, targets, config.ridge)
    step = config.initial_step
    tolerance = None
    for _ in range(config.max_iterations):
        scores = weights.T @ train_features + bias[:, None]
        scores -= scores.max(axis=0, keepdims=True)
        probs = np.exp(scores)
        probs /= probs.sum(axis=0, keepdims=True)
        residual = probs - targets
        grad_w = train_features @ residual.T / n + config.ridge * weights
        grad_b = residual.sum(axis=1) / n
        grad_norm = float(np.sqrt(np.sum(grad_w * grad_w) + np.sum(grad_b * grad_b)))
        if not np.isfinite(value) or not np.isfinite(grad_norm):
            raise DivergenceError("softmax training produced non-finite values")
        if tolerance is None:
            tolerance = config.gradient_tolerance * max(1.0, grad_norm)
        if grad_norm < tolerance:
            break
        while True:
            new_w = weights - step * grad_w
            new_b = bias - step * grad_b
            new_value = _softmax_objective(
                new_w, new_b, train_features, targets, config.ridge
            )
            if new_value <= value:
                break
            step *= 0.5
            if step < 1e-18:
                return SoftmaxModel(weights, bias, class_count)
        weights, bias, value = new_w, new_b, new_value
        step = min(step * 2.0, 1e3)
    return SoftmaxModel(weights, bias, class_count)


def softmax_predict(model, test_features):
    """Argmax class per column; score ties resolve to the smallest class."""
    test_features = np.asarray(test_features, dtype=float)
    if test_features.shape[0] != model.weights.shape[0]:
        raise ShapeError(
            f"model expects {model.weights.shape[0]} features, "
            f"got {test_features.shape[0]}"
        )
    return np.argmax(_scores(model, test_features), axis=0) + 1


def accuracy(predicted, truth):
    predicted = np.asarray(predicted)
    truth = np.asarray(truth)
    if predicted.shape != truth.shape or predicted.size == 0:
        raise ShapeError(
            f"prediction/truth lengths disagree or empty: "
            f"{predicted.shape} vs {truth.shape}"
        )
    return float(np.mean(predicted == truth))


def _rank_features(weights):
    """All 1-based feature indices ordered by decreasing row norm."""
    norms = row_norms(weights)
    return [int(i) + 1 for i in np.argsort(-norms, kind="stable")]


def _path_selection(path, target):
    """Support of the nearest path point, padded to the target count.

    When the nearest support is smaller than the target, the remaining
    slots are filled by the largest row norms of the densest path point,
    so exact-sparsity paths still serve an arbitrary feature-count grid.
    """
    point = select_by_count(path, target)
    selected = list(point.support)
    if len(selected) < target:
        densest = max(path.points, key=lambda p: p.support_size)
        chosen = set(selected)
        for idx in _rank_features(densest.weights):
            if len(selected) >= target:
                break
            if idx not in chosen:
                selected.append(idx)
                chosen.add(idx)
    return tuple(sorted(selected)), point.lam


def _standardize_pair(train_x, test_x):
    mean = train_x.mean(axis=1, keepdims=True)
    std = train_x.std(axis=1, keepdims=True)
    std[std == 0.0] = 1.0
    return (train_x - mean) / std, (test_x - mean) / std


def _classify(name, train_x, train_labels, test_x, class_count, knn_k, clf_config):
    if name == "knn":
        k = min(knn_k, train_x.shape[1])
        return knn_predict(train_x, train_labels, test_x, k)
    model = softmax_train(train_x, train_labels, clf_config, class_count)
    return softmax_predict(model, test_x)


def run_experiment(
    dataset,
    method,
    grids=None,
    trials=10,
    seed=0,
    solver_config=None,
    classifier_config=None,
    classifiers=("knn", "softmax"),
    train_fraction=2.0 / 3.0,
    standardize=False,
    knn_k=5,
    dataset_name="dataset",
):
    """Repeated split/solve/classify sweep; returns an :class:`ExperimentReport`.

    ``method`` is one of ``hiht``, ``ahiht``, ``l21`` or ``baseline`` (no
    selection). Trial ``t`` uses split seed ``seed + t``; everything
    downstream is deterministic, so the report is a pure function of its
    arguments. ``train_seconds`` on each result is the feature-learning
    time of its trial (shared across that trial's grid entries).
    """
    if method not in ("hiht", "ahiht", "l21", "baseline"):
        raise ParameterError(f"unknown method {method!r}")
    grids = grids or ExperimentGrids()
    if method == "l21" and not grids.lambda_grid:
        raise ParameterError("l21 needs a nonempty lambda grid")
    if method in ("hiht", "ahiht") and not grids.feature_counts:
        raise ParameterError("path methods need a nonempty feature-count grid")
    solver_config = solver_config or SolverConfig()
    d = dataset.feature_count
    seeds = tuple(seed + t for t in range(trials))
    results = []
    for t, split_seed in enumerate(seeds):
        train, test = stratified_split(dataset, train_fraction, split_seed)
        train_x, test_x = train.features, test.features
        if standardize:
            train_x, test_x = _standardize_pair(train_x, test_x)

        selections = []  # (lambda_or_k, target, selected)
        if method == "baseline":
            started = time.perf_counter()
            selections.append((0.0, None, tuple(range(1, d + 1))))
            solve_seconds = time.perf_counter() - started
        elif method in ("hiht", "ahiht"):
            solve = hiht_solve if method == "hiht" else ahiht_solve
            started = time.perf_counter()
            path = solve(_centered(train_x, train), solver_config)
            solve_seconds = time.perf_counter() - started
            for target in grids.feature_counts:
                target = min(int(target), d)
                selected, lam = _path_selection(path, target)
                selections.append((lam, target, selected))
        else:
            started = time.perf_counter()
            centered = _centered(train_x, train)
            for lam in grids.lambda_grid:
                weights = l21_solve(centered, lam, solver_config)
                ranking = _rank_features(weights)
                for target in grids.feature_counts:
                    target = min(int(target), d)
                    selected = tuple(sorted(ranking[:target]))
                    selections.append((lam, target, selected))
            solve_seconds = time.perf_counter() - started

        for lam_or_k, target, selected in selections:
            train_sel = restrict_features(train_x, selected)
            test_sel = restrict_features(test_x, selected)
            for clf in classifiers:
                predicted = _classify(
                    clf, train_sel, train.labels, test_sel,
                    dataset.class_count, knn_k, classifier_config,
                )
                results.append(
                    TrialResult(
                        method=method,
                        lambda_or_k=float(lam_or_k),
                        selected_features=selected,
                        accuracy=accuracy(predicted, test.labels),
                        train_seconds=solve_seconds,
                        classifier=clf,
                        trial_index=t,
                        target_count=target,
                    )
                )

    acc = np.array([r.accuracy for r in results])
    counts = np.array([len(r.selected_features) for r in results])
    return ExperimentReport(
        dataset_name=dataset_name,
        trials=tuple(results),
        mean_accuracy=float(acc.mean()),
        accuracy_std=float(acc.std()),
        mean_feature_count=float(counts.mean()),
        config={
            "method": method,
            "trials": trials,
            "seed": seed,
            "train_fraction": train_fraction,
            "standardize": standardize,
            "knn_k": knn_k,
            "lambda_grid": list(grids.lambda_grid),
            "feature_counts": list(grids.feature_counts),
            "solver": {
                k: v for k, v in vars(solver_config).items()
            },
        },
        seeds=seeds,
    )


def _centered(features, split):
    return center(
        Dataset(
            features=features,
            labels=split.labels,
            class_count=split.class_count,
            feature_names=split.feature_names,
            label_names=split.label_names,
        )
    )


def accuracy_curve(report, classifier):
    """Mean accuracy per feature-count target, sorted by count."""
    buckets = {}
    for r in report.trials:
        if r.classifier != classifier or r.target_count is None:
            continue
        buckets.setdefault(r.target_count, []).append(r.accuracy)
    return [(count, float(np.mean(vals))) for count, vals in sorted(buckets.items())]
