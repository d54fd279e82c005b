"""Datasets, label encoding, centering and stratified splitting.

Conventions used throughout the package:

* feature matrices are ``d x N`` (rows = features, columns = samples);
* class labels are integers ``1..C``;
* feature indices exposed in results (supports, selections) are 1-based.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DataError, ParameterError

__all__ = [
    "Dataset",
    "CenteredData",
    "one_hot_encode",
    "center",
    "stratified_split",
]


@dataclass(frozen=True, eq=False)
class Dataset:
    """A labelled multi-class dataset.

    ``features`` is a ``d x N`` float matrix, ``labels`` a length-``N`` integer
    array with values in ``1..class_count``. ``feature_names`` and
    ``label_names`` are optional (``label_names[c-1]`` is the original token
    for class ``c`` when the data came from a file).
    """

    features: np.ndarray
    labels: np.ndarray
    class_count: int
    feature_names: tuple[str, ...] | None = None
    label_names: tuple[str, ...] | None = None

    def __post_init__(self):
        features = np.asarray(self.features, dtype=float)
        labels = np.asarray(self.labels, dtype=int)
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)
        if features.ndim != 2:
            raise DataError(f"features must be a 2-d matrix, got ndim={features.ndim}")
        d, n = features.shape
        if d < 1 or n < 2:
            raise DataError(f"need d >= 1 and N >= 2, got d={d}, N={n}")
        if self.class_count < 2:
            raise DataError(f"need at least 2 classes, got {self.class_count}")
        if labels.shape != (n,):
            raise DataError(
                f"labels must have one entry per sample: got {labels.shape}, N={n}"
            )
        bad = np.nonzero((labels < 1) | (labels > self.class_count))[0]
        if bad.size:
            raise DataError(
                f"label {labels[bad[0]]} at sample {bad[0]} outside 1..{self.class_count}"
            )
        present = np.unique(labels)
        if present.size != self.class_count:
            missing = sorted(set(range(1, self.class_count + 1)) - set(present))
            raise DataError(f"classes {missing} have no samples")
        if self.feature_names is not None:
            names = tuple(self.feature_names)
            object.__setattr__(self, "feature_names", names)
            if len(names) != d:
                raise DataError(
                    f"feature_names has {len(names)} entries for d={d} features"
                )
        if self.label_names is not None:
            names = tuple(self.label_names)
            object.__setattr__(self, "label_names", names)
            if len(names) != self.class_count:
                raise DataError(
                    f"label_names has {len(names)} entries for {self.class_count} classes"
                )

    @property
    def feature_count(self):
        return self.features.shape[0]

    @property
    def sample_count(self):
        return self.features.shape[1]


@dataclass(frozen=True, eq=False)
class CenteredData:
    """Column-centered design and label matrices with their removed means.

    Produced by :func:`center`; every row of ``x_centered``/``y_centered``
    then sums to zero and the originals are recovered by adding the means
    back. Instances may also be built directly for solver inputs that are
    not mean-free (the solvers never rely on centering itself).
    """

    x_centered: np.ndarray
    y_centered: np.ndarray
    x_mean: np.ndarray
    y_mean: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x_centered, dtype=float)
        y = np.asarray(self.y_centered, dtype=float)
        xm = np.asarray(self.x_mean, dtype=float)
        ym = np.asarray(self.y_mean, dtype=float)
        for name, val in (("x_centered", x), ("y_centered", y)):
            if val.ndim != 2:
                raise DataError(f"{name} must be 2-d, got ndim={val.ndim}")
        if x.shape[1] != y.shape[1]:
            raise DataError(
                f"sample counts disagree: x has {x.shape[1]}, y has {y.shape[1]}"
            )
        if xm.shape != (x.shape[0],) or ym.shape != (y.shape[0],):
            raise DataError("mean vectors must match the row counts of x and y")
        object.__setattr__(self, "x_centered", x)
        object.__setattr__(self, "y_centered", y)
        object.__setattr__(self, "x_mean", xm)
        object.__setattr__(self, "y_mean", ym)

    @property
    def feature_count(self):
        return self.x_centered.shape[0]

    @property
    def class_count(self):
        return self.y_centered.shape[0]

    @property
    def sample_count(self):
        return self.x_centered.shape[1]


def one_hot_encode(labels, class_count):
    """Encode 1-based class labels as a ``C x N`` {0,1} matrix.

    Column ``j`` has a single 1 in row ``labels[j]``.
    """
    labels = np.asarray(labels, dtype=int)
    if labels.ndim != 1 or labels.size == 0:
        raise DataError("labels must be a nonempty 1-d sequence")
    bad = np.nonzero((labels < 1) | (labels > class_count))[0]
    if bad.size:
        raise DataError(
            f"label {labels[bad[0]]} at position {bad[0]} outside 1..{class_count}"
        )
    values = np.zeros((class_count, labels.size))
    values[labels - 1, np.arange(labels.size)] = 1.0
    return values


def center(dataset):
    """Subtract per-row means from the features and the one-hot labels.

    Equivalent to right-multiplying both by the idempotent mean-removal
    matrix ``I - (1/N) 11^T``, but costs O(dN) because the N x N matrix is
    never formed.
    """
    if dataset.sample_count < 2:
        raise DataError("centering needs at least 2 samples")
    x = dataset.features
    y = one_hot_encode(dataset.labels, dataset.class_count)
    x_mean = x.mean(axis=1)
    y_mean = y.mean(axis=1)
    return CenteredData(
        x_centered=x - x_mean[:, None],
        y_centered=y - y_mean[:, None],
        x_mean=x_mean,
        y_mean=y_mean,
    )


def stratified_split(dataset, train_fraction, seed):
    """Split into (train, test) keeping per-class proportions.

    Each class contributes ``ceil(train_fraction * n_c)`` samples to train,
    clamped so at least one sample per class remains for testing. The split
    is a deterministic function of ``seed``; sample order is preserved
    within each side.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ParameterError(f"train_fraction must be in (0, 1), got {train_fraction}")
    labels = dataset.labels
    rng = np.random.default_rng(seed)
    train_idx = []
    for c in range(1, dataset.class_count + 1):
        members = np.nonzero(labels == c)[0]
        if members.size < 2:
            raise DataError(
                f"class {c} has {members.size} sample(s); stratified split needs >= 2"
            )
        take = int(np.ceil(train_fraction * members.size))
        take = min(take, members.size - 1)
        order = rng.permutation(members.size)
        train_idx.extend(members[order[:take]])
    train_mask = np.zeros(dataset.sample_count, dtype=bool)
    train_mask[train_idx] = True

    def subset(mask):
        return Dataset(
            features=dataset.features[:, mask],
            labels=labels[mask],
            class_count=dataset.class_count,
            feature_names=dataset.feature_names,
            label_names=dataset.label_names,
        )

    return subset(train_mask), subset(~train_mask)
