"""1-NN classification under per-class band-constrained DTW.

The distance from a query to a training item uses the band of the item's
own class. Candidates are visited in ascending LB_Keogh order and a
candidate is skipped once its lower bound exceeds the best exact distance
found so far; the pruned search returns the same answer as exhaustive
computation. Comparisons stay in squared space — argmin is unaffected.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .bands import BandSet
from .dtw import _accumulated_sq, _envelope_from_mask, _lb_sq
from .learning import LearnLog, learn_best_band
from .series import LabeledDataset, preprocess
from .silhouette import _check_bands


def _band_caches(
    data: LabeledDataset, bands: BandSet
) -> tuple[dict[int, np.ndarray], np.ndarray, np.ndarray]:
    """Per-class feasibility masks plus per-item band envelopes."""
    masks = {label: bands.band_for(label).mask() for label in data.label_set}
    lower = np.empty_like(data.values)
    upper = np.empty_like(data.values)
    for i, label in enumerate(data.labels):
        lower[i], upper[i] = _envelope_from_mask(data.values[i], masks[int(label)])
    return masks, lower, upper


def _nearest(
    values: np.ndarray,
    labels: np.ndarray,
    masks: dict[int, np.ndarray],
    lower: np.ndarray,
    upper: np.ndarray,
    query: np.ndarray,
    exclude: int = -1,
) -> tuple[int, float, list[int]]:
    """Index and distance of the query's nearest item, plus pruned indices.

    Equal distances keep the smaller dataset index. A candidate is pruned
    only when its squared lower bound strictly exceeds the best squared
    distance, so equal-distance candidates are always examined and the
    result matches exhaustive search exactly.
    """
    n = values.shape[0]
    bounds = np.empty(n)
    for i in range(n):
        bounds[i] = _lb_sq(query, lower[i], upper[i])
    order = np.argsort(bounds, kind="stable")
    best_idx = -1
    best_sq = math.inf
    skipped: list[int] = []
    for pos, i in enumerate(order):
        i = int(i)
        if i == exclude:
            continue
        if bounds[i] > best_sq:
            # Ascending bound order: everything left is prunable too.
            skipped = [int(j) for j in order[pos:] if j != exclude]
            break
        d = _accumulated_sq(query, values[i], masks[int(labels[i])])
        if d < best_sq or (d == best_sq and i < best_idx):
            best_sq = d
            best_idx = i
    return best_idx, math.sqrt(best_sq), skipped


class ClassifierModel:
    """Immutable 1-NN model: training data, per-class bands, and the
    leave-one-out accuracy estimated when the model was built.

    Feasibility masks and LB_Keogh envelopes are precomputed per training
    item so repeated predictions share them.
    """

    def __init__(self, train: LabeledDataset, bands: BandSet, predicted_accuracy: float):
        _check_bands(train, bands)
        if not 0.0 <= predicted_accuracy <= 1.0:
            raise ValueError(f"predicted_accuracy must be in [0, 1], got {predicted_accuracy}")
        self.train = train
        self.bands = bands
        self.predicted_accuracy = float(predicted_accuracy)
        self._masks, self._lower, self._upper = _band_caches(train, bands)

    def _query(self, query) -> np.ndarray:
        query = np.ascontiguousarray(query, dtype=np.float64)
        if query.ndim != 1 or query.shape[0] != self.train.series_length:
            raise ValueError(
                f"query must be 1-D of length {self.train.series_length}, got shape {query.shape}"
            )
        return query


def build_model(train: LabeledDataset, bands: BandSet, threads: int = 1) -> ClassifierModel:
    """Model over ``train`` with its leave-one-out accuracy under ``bands``."""
    return ClassifierModel(train, bands, loo_accuracy(train, bands, threads))


def _predict_detail(
    model: ClassifierModel, query, exclude: int = -1
) -> tuple[int, float, list[int]]:
    query = model._query(query)
    return _nearest(
        model.train.values,
        model.train.labels,
        model._masks,
        model._lower,
        model._upper,
        query,
        exclude,
    )


def predict_1nn(model: ClassifierModel, query) -> int:
    """Label of the training item nearest to ``query`` under its class band."""
    index, _, _ = _predict_detail(model, query)
    return int(model.train.labels[index])


def predict_many(model: ClassifierModel, queries, threads: int = 1) -> np.ndarray:
    """Labels for each row of ``queries``, in order.

    Queries are independent; with ``threads`` > 1 they are classified in
    parallel with identical results.
    """
    queries = np.ascontiguousarray(queries, dtype=np.float64)
    if queries.size == 0:
        return np.empty(0, dtype=np.int64)
    if queries.ndim != 2 or queries.shape[1] != model.train.series_length:
        raise ValueError(
            f"queries must be 2-D with row length {model.train.series_length}, "
            f"got shape {queries.shape}"
        )
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            labels = list(pool.map(lambda q: predict_1nn(model, q), queries))
    else:
        labels = [predict_1nn(model, q) for q in queries]
    return np.asarray(labels, dtype=np.int64)


def loo_accuracy(data: LabeledDataset, bands: BandSet, threads: int = 1) -> float:
    """Leave-one-out 1-NN accuracy: each item classified against the rest."""
    if data.n_items < 2:
        raise ValueError("leave-one-out accuracy is undefined for fewer than 2 items")
    _check_bands(data, bands)
    masks, lower, upper = _band_caches(data, bands)

    def hit(i: int) -> bool:
        index, _, _ = _nearest(data.values, data.labels, masks, lower, upper, data.values[i], i)
        return bool(data.labels[index] == data.labels[i])

    indices = range(data.n_items)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            hits = sum(pool.map(hit, indices))
    else:
        hits = sum(hit(i) for i in indices)
    return hits / data.n_items


def run_pipeline(
    train: LabeledDataset,
    test,
    complexity_threshold: float,
    bound_percent: int,
    seed: int = 0,
    threads: int = 1,
    log: LearnLog | None = None,
) -> tuple[np.ndarray, float, ClassifierModel]:
    """Full pipeline: resample to the complexity threshold, learn the best
    band set, estimate accuracy leave-one-out, and classify the test rows.

    The learning bound is ``bound_percent`` of the post-resampling length,
    rounded half-up. Returns (predictions, predicted_accuracy, model).
    """
    if not 0 <= bound_percent <= 100:
        raise ValueError(f"bound_percent must be in [0, 100], got {bound_percent}")
    test = np.ascontiguousarray(test, dtype=np.float64)
    if test.size and (test.ndim != 2 or test.shape[1] != train.series_length):
        raise ValueError(
            f"test rows must match the training length {train.series_length}, "
            f"got shape {test.shape}"
        )
    train, test, length = preprocess(train, test, complexity_threshold)
    bound = int(math.floor(length * bound_percent / 100.0 + 0.5))
    bands, _, _ = learn_best_band(train, bound, seed, log, threads)
    model = build_model(train, bands, threads)
    predictions = predict_many(model, test, threads)
    return predictions, model.predicted_accuracy, model
