"""Silhouette index over a labeled dataset, plain and band-parameterized.

The per-item score is (b - a) / max(a, b), where a is the mean distance to
the item's own class (excluding itself) and b the smallest mean distance to
any other class. Class scores average their members; the global index
averages the class scores. In the band-parameterized form the distance from
item i to item j uses the band of j's class, so the pairwise table is
ordered (it need not be symmetric across classes).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .bands import BandSet
from .dtw import _accumulated_sq
from .series import LabeledDataset


@dataclass(frozen=True)
class SilhouetteReport:
    """Global index plus the per-class and per-item scores behind it."""

    global_index: float
    per_class: dict[int, float]
    per_item: np.ndarray


def _item_score(a: float | None, b: float) -> float:
    # a is None for singleton classes: the within-class mean is undefined
    # and the neutral score 0 is used.
    if a is None:
        return 0.0
    denom = max(a, b)
    if denom == 0.0:
        return 0.0
    return (b - a) / denom


def silhouette_item(i: int, data: LabeledDataset, dist: Callable[[int, int], float]) -> float:
    """Silhouette score of item ``i`` under a pairwise distance provider."""
    labels = data.label_set
    if len(labels) < 2:
        raise ValueError("silhouette needs at least 2 classes")
    own = int(data.labels[i])
    same = data.members(own)
    if len(same) <= 1:
        return 0.0
    a = sum(dist(i, int(j)) for j in same if j != i) / (len(same) - 1)
    b = min(
        sum(dist(i, int(j)) for j in data.members(other)) / len(data.members(other))
        for other in labels
        if other != own
    )
    return _item_score(a, b)


def _report_from_matrix(matrix: np.ndarray, data: LabeledDataset) -> SilhouetteReport:
    labels = data.label_set
    if len(labels) < 2:
        raise ValueError("silhouette needs at least 2 classes")
    cols = [data.members(label) for label in labels]
    counts = np.array([len(c) for c in cols])
    sums = np.column_stack([matrix[:, c].sum(axis=1) for c in cols])
    pos = {label: k for k, label in enumerate(labels)}

    per_item = np.empty(data.n_items)
    for i in range(data.n_items):
        k = pos[int(data.labels[i])]
        other = [m for m in range(len(labels)) if m != k]
        b = float(np.min(sums[i, other] / counts[other]))
        if counts[k] <= 1:
            per_item[i] = _item_score(None, b)
        else:
            a = (sums[i, k] - matrix[i, i]) / (counts[k] - 1)
            per_item[i] = _item_score(a, b)

    per_class = {label: float(per_item[c].mean()) for label, c in zip(labels, cols)}
    global_index = float(np.mean([per_class[label] for label in labels]))
    return SilhouetteReport(global_index, per_class, per_item)


def silhouette_report(data: LabeledDataset, dist: Callable[[int, int], float]) -> SilhouetteReport:
    """Full silhouette breakdown under a pairwise distance provider."""
    n = data.n_items
    matrix = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i != j:
                matrix[i, j] = dist(i, j)
    return _report_from_matrix(matrix, data)


def _check_bands(data: LabeledDataset, bands: BandSet) -> None:
    missing = [label for label in data.label_set if label not in bands.bands]
    if missing:
        raise ValueError(f"no band configured for classes {missing}")
    if bands.n != data.series_length:
        raise ValueError(
            f"band length {bands.n} does not match series length {data.series_length}"
        )


def _fill_columns(
    matrix: np.ndarray, values: np.ndarray, columns: np.ndarray, mask: np.ndarray
) -> None:
    """Recompute ``matrix[:, j]`` for the given columns under one band mask."""
    n = values.shape[0]
    for j in columns:
        c = values[j]
        for i in range(n):
            if i != j:
                matrix[i, j] = np.sqrt(_accumulated_sq(values[i], c, mask))


def distance_table(data: LabeledDataset, bands: BandSet, threads: int = 1) -> np.ndarray:
    """Ordered pairwise DTW table: entry (i, j) uses the band of j's class.

    The diagonal is 0. Entries are independent, so the table may be filled by
    several threads; the result is identical either way.
    """
    _check_bands(data, bands)
    n = data.n_items
    matrix = np.zeros((n, n))
    per_class = [(data.members(label), bands.band_for(label).mask()) for label in data.label_set]
    if threads <= 1 or n < 4:
        for columns, mask in per_class:
            _fill_columns(matrix, data.values, columns, mask)
        return matrix
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = []
        for columns, mask in per_class:
            for chunk in np.array_split(columns, threads):
                if len(chunk):
                    futures.append(
                        pool.submit(_fill_columns, matrix, data.values, chunk, mask)
                    )
        for future in futures:
            future.result()
    return matrix


def evaluate(data: LabeledDataset, bands: BandSet, threads: int = 1) -> float:
    """Global silhouette of the dataset under per-class DTW bands, in [-1, 1]."""
    return _report_from_matrix(distance_table(data, bands, threads), data).global_index
