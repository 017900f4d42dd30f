"""Time series containers, z-normalization, resampling, and size-driven preprocessing.

A single time series is a 1-D float ndarray of length >= 2. A labeled dataset
stores all series as rows of one 2-D array, which enforces the equal-length
requirement by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class DatasetFormatError(ValueError):
    """Raised when a dataset file cannot be parsed; carries the 1-based line number."""

    def __init__(self, message: str, line_no: int | None = None):
        super().__init__(message)
        self.line_no = line_no


class ComplexityUnreachableError(RuntimeError):
    """Raised when halving cannot bring the complexity under the threshold.

    ``achievable_length`` is the shortest series length reachable by halving.
    """

    def __init__(self, message: str, achievable_length: int):
        super().__init__(message)
        self.achievable_length = achievable_length


def _as_series(values, min_length: int = 2) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"series must be 1-D, got shape {arr.shape}")
    if arr.shape[0] < min_length:
        raise ValueError(f"series must have at least {min_length} samples, got {arr.shape[0]}")
    return arr


def znormalize(series) -> np.ndarray:
    """Shift and scale a series to mean 0 and population standard deviation 1.

    A constant series (population std below 1e-12) maps to the all-zero
    series of the same length instead of raising.
    """
    arr = _as_series(series)
    mean = arr.mean()
    std = arr.std()
    if std < 1e-12:
        return np.zeros_like(arr)
    return (arr - mean) / std


def znormalize_rows(values: np.ndarray) -> np.ndarray:
    """Row-wise :func:`znormalize` for a 2-D array of series."""
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        return values.copy()
    mean = values.mean(axis=1, keepdims=True)
    std = values.std(axis=1, keepdims=True)
    out = np.where(std < 1e-12, 0.0, (values - mean) / np.where(std < 1e-12, 1.0, std))
    return out


def _resample_rows(values: np.ndarray) -> np.ndarray:
    """Halve the length of every row by uniform linear interpolation.

    Output index k of L' = floor(L/2) points samples the input at real
    position k*(L-1)/(L'-1), so both endpoints are preserved exactly.
    """
    n_in = values.shape[1]
    n_out = n_in // 2
    pos = np.linspace(0.0, n_in - 1, n_out)
    lo = np.minimum(pos.astype(np.int64), n_in - 2)
    frac = pos - lo
    return values[:, lo] * (1.0 - frac) + values[:, lo + 1] * frac


def resample_half(series) -> np.ndarray:
    """Shrink a series to floor(length/2) samples by linear interpolation.

    Refuses series shorter than 4 samples; the output would degenerate below
    the 2-sample minimum.
    """
    arr = _as_series(series)
    if arr.shape[0] < 4:
        raise ValueError(f"cannot halve a series of length {arr.shape[0]} (minimum 4)")
    return _resample_rows(arr[np.newaxis, :])[0]


def complexity(n: int, m: int) -> float:
    """Size measure log10(n^2 * m^2) for n series of length m."""
    if n < 1 or m < 1:
        raise ValueError("n and m must be positive")
    return 2.0 * math.log10(float(n) * float(m))


@dataclass(frozen=True)
class LabeledDataset:
    """Equal-length labeled series: ``values`` rows paired with integer ``labels``."""

    values: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        labels = np.asarray(self.labels)
        if values.ndim != 2:
            raise ValueError(f"values must be 2-D (items x length), got shape {values.shape}")
        if values.shape[0] < 1:
            raise ValueError("dataset must contain at least one series")
        if values.shape[1] < 2:
            raise ValueError("series must have at least 2 samples")
        if labels.shape != (values.shape[0],):
            raise ValueError(
                f"labels shape {labels.shape} does not match {values.shape[0]} series"
            )
        if not np.issubdtype(labels.dtype, np.integer):
            if not np.all(labels == labels.astype(np.int64)):
                raise ValueError("labels must be integers")
        labels = labels.astype(np.int64)
        values = values.copy()
        values.flags.writeable = False
        labels.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "labels", labels)
        members = {
            int(label): np.flatnonzero(labels == label) for label in np.unique(labels)
        }
        object.__setattr__(self, "_members", members)

    @property
    def n_items(self) -> int:
        return self.values.shape[0]

    @property
    def series_length(self) -> int:
        return self.values.shape[1]

    @property
    def label_set(self) -> tuple[int, ...]:
        return tuple(sorted(self._members))

    def members(self, label: int) -> np.ndarray:
        """Row indices of all series carrying ``label``."""
        return self._members[int(label)]

    def series(self, i: int) -> np.ndarray:
        return self.values[i]

    def with_values(self, values: np.ndarray) -> "LabeledDataset":
        """Same labels over a new value matrix (e.g. after resampling)."""
        return LabeledDataset(values, self.labels)


def preprocess(
    train: LabeledDataset,
    test: np.ndarray,
    threshold: float,
) -> tuple[LabeledDataset, np.ndarray, int]:
    """Halve every series until ``complexity(N, L)`` drops to the threshold.

    The training-set size N never changes; each pass halves the length of
    every training and test series together, keeping the corpus equal-length.
    Returns the (possibly untouched) inputs and the final length.
    """
    test = np.asarray(test, dtype=np.float64)
    if test.size and test.ndim != 2:
        raise ValueError(f"test series must form a 2-D array, got shape {test.shape}")
    if test.size and test.shape[1] != train.series_length:
        raise ValueError(
            f"test length {test.shape[1]} does not match training length {train.series_length}"
        )
    n = train.n_items
    length = train.series_length
    train_values = train.values
    test_values = test
    halvings = 0
    while complexity(n, length) > threshold:
        if length < 4:
            raise ComplexityUnreachableError(
                f"complexity {complexity(n, length):.4f} still above threshold "
                f"{threshold} at minimum length {length}",
                achievable_length=length,
            )
        train_values = _resample_rows(train_values)
        if test_values.size:
            test_values = _resample_rows(test_values)
        length = train_values.shape[1]
        halvings += 1
    if halvings == 0:
        return train, test, length
    new_train = train.with_values(train_values)
    if test.size:
        return new_train, test_values, length
    return new_train, np.empty((0, length)), length


def _parse_line(line: str, line_no: int, path: str) -> list[float]:
    tokens = line.replace(",", " ").split()
    out = []
    for tok in tokens:
        try:
            out.append(float(tok))
        except ValueError:
            raise DatasetFormatError(
                f"{path}, line {line_no}: cannot parse value {tok!r}", line_no
            ) from None
    return out


def _parse_label(value: float, line_no: int, path: str) -> int:
    if not math.isfinite(value) or value != int(value):
        raise DatasetFormatError(
            f"{path}, line {line_no}: class label must be an integer, got {value!r}",
            line_no,
        )
    return int(value)


def load_labeled(path: str) -> LabeledDataset:
    """Read a labeled dataset file: one series per line, label in column 1.

    Values are whitespace- or comma-separated. Raises
    :class:`DatasetFormatError` with the offending line number on ragged
    lengths, non-numeric values, or non-integer labels.
    """
    rows: list[list[float]] = []
    labels: list[int] = []
    length: int | None = None
    with open(path) as fh:
        for line_no, line in enumerate(fh, start=1):
            fields = _parse_line(line, line_no, path)
            if not fields:
                continue
            if len(fields) < 3:
                raise DatasetFormatError(
                    f"{path}, line {line_no}: need a label and at least 2 samples, "
                    f"found {len(fields)} fields",
                    line_no,
                )
            labels.append(_parse_label(fields[0], line_no, path))
            samples = fields[1:]
            if length is None:
                length = len(samples)
            elif len(samples) != length:
                raise DatasetFormatError(
                    f"{path}, line {line_no}: expected {length} samples, found {len(samples)}",
                    line_no,
                )
            rows.append(samples)
    if not rows:
        raise DatasetFormatError(f"{path}: no series found", None)
    return LabeledDataset(np.asarray(rows), np.asarray(labels))


def load_unlabeled(path: str) -> np.ndarray:
    """Read an unlabeled series file (samples only); empty files yield 0 rows."""
    rows: list[list[float]] = []
    length: int | None = None
    with open(path) as fh:
        for line_no, line in enumerate(fh, start=1):
            fields = _parse_line(line, line_no, path)
            if not fields:
                continue
            if len(fields) < 2:
                raise DatasetFormatError(
                    f"{path}, line {line_no}: need at least 2 samples, found {len(fields)}",
                    line_no,
                )
            if length is None:
                length = len(fields)
            elif len(fields) != length:
                raise DatasetFormatError(
                    f"{path}, line {line_no}: expected {length} samples, found {len(fields)}",
                    line_no,
                )
            rows.append(fields)
    if not rows:
        return np.empty((0, 0))
    return np.asarray(rows)
