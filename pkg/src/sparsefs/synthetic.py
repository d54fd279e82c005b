"""Synthetic row-sparse classification problems with known ground truth."""

import numpy as np

from .data import Dataset
from .errors import DataError, ParameterError

__all__ = ["generate_synthetic"]

_MAX_REDRAWS = 100


def generate_synthetic(d, n, class_count, true_support_size, noise_sigma, seed):
    """Draw a dataset whose labels depend on exactly the planted feature rows.

    A ground-truth weight matrix gets ``true_support_size`` unit-norm rows
    at positions chosen by the seed; features are standard normal and each
    label is the argmax of the class scores after adding Gaussian noise of
    the given sigma. Returns ``(dataset, planted_support)`` with the
    support as sorted 1-based indices.

    Label draws that miss a class entirely are redrawn (fresh features and
    noise, same planted weights) so the result is always a valid dataset;
    this is deterministic for a fixed seed.
    """
    if true_support_size > d:
        raise ParameterError(
            f"support size {true_support_size} exceeds dimension {d}"
        )
    if true_support_size < 0:
        raise ParameterError("support size must be >= 0")
    if n < 4 * class_count:
        raise ParameterError(f"need N >= 4C, got N={n}, C={class_count}")
    if noise_sigma < 0:
        raise ParameterError(f"noise sigma must be >= 0, got {noise_sigma}")
    rng = np.random.default_rng(seed)
    support_rows = np.sort(rng.choice(d, size=true_support_size, replace=False))
    true_weights = np.zeros((d, class_count))
    for i in support_rows:
        row = rng.standard_normal(class_count)
        true_weights[i] = row / np.linalg.norm(row)

    for _ in range(_MAX_REDRAWS):
        features = rng.standard_normal((d, n))
        scores = true_weights.T @ features
        if noise_sigma > 0:
            scores = scores + noise_sigma * rng.standard_normal((class_count, n))
        labels = np.argmax(scores, axis=0) + 1
        if np.unique(labels).size == class_count:
            dataset = Dataset(
                features=features, labels=labels, class_count=class_count
            )
            return dataset, tuple(int(i) + 1 for i in support_rows)
    raise DataError(
        "could not draw labels covering every class; "
        "scores are degenerate (e.g. zero support with zero noise)"
    )
