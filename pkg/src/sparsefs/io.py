"""File formats: CSV datasets, key=value configs, trace tables, result records.

All writes are whole-file atomic (temp file in the target directory, then
rename). Trace tables are comma-separated with a header line, LF endings
and 12 significant digits — enough to check monotonicity invariants from
the files alone. Result records are JSON trees with sorted keys and a
mandatory ``schema_version``; floats round-trip exactly.
"""

import csv
import hashlib
import json
import os
import tempfile

import numpy as np

from .data import Dataset
from .errors import CsvParseError, ParameterError

__all__ = [
    "load_csv",
    "save_csv",
    "load_config",
    "write_trace_table",
    "write_record",
    "read_record",
    "dataset_fingerprint",
]

SCHEMA_VERSION = 1


def _atomic_write(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_csv(path, label_column=None, has_header=False):
    """Read a samples-by-rows CSV into the internal features-by-columns layout.

    One column holds the labels (the last one unless ``label_column`` names
    another; names require a header). Label tokens may be anything and are
    mapped to ``1..C`` in first-appearance order; the original tokens are
    kept on the dataset. Parse failures report the offending line number.
    """
    try:
        with open(path, encoding="utf-8", newline="") as handle:
            rows = list(csv.reader(handle))
    except OSError as exc:
        raise CsvParseError(f"cannot read {path}: {exc}") from exc
    rows = [(i + 1, row) for i, row in enumerate(rows) if row]
    if not rows:
        raise CsvParseError(f"{path}: file is empty")

    header = None
    if has_header:
        header = [cell.strip() for cell in rows[0][1]]
        rows = rows[1:]
        if not rows:
            raise CsvParseError(f"{path}: no data rows after the header")
    width = len(rows[0][1])
    if width < 2:
        raise CsvParseError(
            f"{path}: line {rows[0][0]}: need at least one feature and a label column"
        )

    if label_column is None:
        label_idx = width - 1
    else:
        if header is None:
            raise CsvParseError(
                f"{path}: label column {label_column!r} given but file has no header"
            )
        try:
            label_idx = header.index(label_column)
        except ValueError:
            raise CsvParseError(
                f"{path}: label column {label_column!r} not in header {header}"
            ) from None

    samples = []
    tokens = []
    for line_no, row in rows:
        if len(row) != width:
            raise CsvParseError(
                f"{path}: line {line_no}: expected {width} cells, got {len(row)}"
            )
        values = []
        for j, cell in enumerate(row):
            if j == label_idx:
                continue
            try:
                values.append(float(cell))
            except ValueError:
                raise CsvParseError(
                    f"{path}: line {line_no}: non-numeric feature cell {cell!r}"
                ) from None
        samples.append(values)
        tokens.append(row[label_idx].strip())

    mapping = {}
    labels = []
    for token in tokens:
        if token not in mapping:
            mapping[token] = len(mapping) + 1
        labels.append(mapping[token])
    feature_names = None
    if header is not None:
        feature_names = tuple(
            name for j, name in enumerate(header) if j != label_idx
        )
    return Dataset(
        features=np.array(samples, dtype=float).T,
        labels=np.array(labels, dtype=int),
        class_count=len(mapping),
        feature_names=feature_names,
        label_names=tuple(mapping),
    )


def save_csv(dataset, path, include_header=False):
    """Write a dataset back to CSV (samples as rows, label column last).

    Feature values use the shortest representation that parses back to the
    identical float, so a save/load round trip is exact.
    """
    names = dataset.feature_names or tuple(
        f"f{i}" for i in range(1, dataset.feature_count + 1)
    )
    label_names = dataset.label_names
    lines = []
    if include_header:
        lines.append(",".join([*names, "label"]))
    for j in range(dataset.sample_count):
        cells = [repr(float(v)) for v in dataset.features[:, j]]
        label = dataset.labels[j]
        cells.append(label_names[label - 1] if label_names else str(label))
        lines.append(",".join(cells))
    _atomic_write(path, "\n".join(lines) + "\n")


def load_config(path, valid_keys):
    """Parse a flat ``key=value`` config file with ``#`` comments."""
    values = {}
    with open(path, encoding="utf-8") as handle:
        for line_no, raw in enumerate(handle, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParameterError(
                    f"{path}: line {line_no}: expected key=value, got {raw.strip()!r}"
                )
            key, value = line.split("=", 1)
            key = key.strip()
            if key not in valid_keys:
                raise ParameterError(
                    f"{path}: line {line_no}: unknown key {key!r}; "
                    f"valid keys: {', '.join(sorted(valid_keys))}"
                )
            values[key] = value.strip()
    return values


def _fmt(value):
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def write_trace_table(path, header, rows):
    """Comma-separated table: header line, then one line per row."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    _atomic_write(path, "\n".join(lines) + "\n")


def write_record(path, record):
    """Persist a result record as a sorted-keys JSON tree."""
    record = dict(record)
    record["schema_version"] = SCHEMA_VERSION
    _atomic_write(path, json.dumps(record, indent=2, sort_keys=True) + "\n")


def read_record(path):
    with open(path, encoding="utf-8") as handle:
        record = json.load(handle)
    if "schema_version" not in record:
        raise ParameterError(f"{path}: record lacks schema_version")
    return record


def dataset_fingerprint(dataset):
    """Dimensions plus a 64-bit content hash of the decimal-rendered data."""
    digest = hashlib.blake2b(digest_size=8)
    digest.update(f"{dataset.feature_count},{dataset.sample_count},"
                  f"{dataset.class_count};".encode())
    for j in range(dataset.sample_count):
        row = ",".join(repr(float(v)) for v in dataset.features[:, j])
        digest.update(row.encode())
        digest.update(f";{dataset.labels[j]}\n".encode())
    return {
        "features": dataset.feature_count,
        "samples": dataset.sample_count,
        "classes": dataset.class_count,
        "content_hash": digest.hexdigest(),
    }
