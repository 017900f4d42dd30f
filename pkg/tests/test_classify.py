import math

import numpy as np
import pytest

from rkdtw import (
    BandSet,
    ClassifierModel,
    LabeledDataset,
    RKBand,
    build_model,
    dtw_distance,
    full_band,
    loo_accuracy,
    predict_1nn,
    predict_many,
    run_pipeline,
    uniform_bandset,
    zero_band,
)
from rkdtw.classify import _predict_detail

from synth import random_dataset, shifted_sines


def _exhaustive(data, bands, query, exclude=-1):
    # plain argmin over every candidate, earliest index on distance ties
    best_d, best_i = math.inf, -1
    for idx in range(data.n_items):
        if idx == exclude:
            continue
        d = dtw_distance(query, data.values[idx], bands.band_for(int(data.labels[idx])))
        if d < best_d:
            best_d, best_i = d, idx
    return best_i, best_d


def _random_bandset(rng, data):
    n = data.series_length
    return BandSet({label: RKBand(rng.integers(0, n + 1, size=n)) for label in data.label_set})


def test_training_item_maps_to_its_own_label():
    rng = np.random.default_rng(0)
    data = random_dataset(rng, n_items=8, length=10, n_classes=3)
    model = build_model(data, uniform_bandset(data.label_set, 10, 20))
    for i in range(data.n_items):
        assert predict_1nn(model, data.values[i]) == data.labels[i]


def test_single_item_training_set():
    data = LabeledDataset(np.array([[1.0, 2.0, 3.0]]), [4])
    model = ClassifierModel(data, BandSet({4: full_band(3)}), 1.0)
    assert predict_1nn(model, [9.0, 9.0, 9.0]) == 4


def test_distance_tie_breaks_to_earliest_index():
    series = np.array([1.0, 2.0, 1.0, 0.0])
    data = LabeledDataset(np.vstack([series, series + 10.0, series]), [5, 1, 3])
    model = ClassifierModel(data, uniform_bandset(data.label_set, 4, 25), 1.0)
    # items 0 and 2 are identical: both at distance 0 from the query
    assert predict_1nn(model, series) == 5
    index, _, _ = _predict_detail(model, series)
    assert index == 0


def test_pruned_matches_exhaustive():
    rng = np.random.default_rng(1)
    data = random_dataset(rng, n_items=20, length=12, n_classes=3)
    bands = _random_bandset(rng, data)
    model = ClassifierModel(data, bands, 1.0)
    for _ in range(200):
        query = rng.normal(size=12)
        index, distance, _ = _predict_detail(model, query)
        expected_i, expected_d = _exhaustive(data, bands, query)
        assert index == expected_i
        assert distance == pytest.approx(expected_d, abs=1e-12)


def test_skipped_candidates_were_never_better():
    rng = np.random.default_rng(2)
    data = shifted_sines(rng, per_class=15, length=16, shift=4, noise=0.3)
    bands = uniform_bandset(data.label_set, 16, 10)
    model = ClassifierModel(data, bands, 1.0)
    saw_skip = False
    for _ in range(50):
        # near-duplicates of training items keep the best distance small,
        # which is what lets the lower bound reject the far cluster
        query = data.values[rng.integers(data.n_items)] + rng.normal(0, 0.05, size=16)
        _, best, skipped = _predict_detail(model, query)
        saw_skip = saw_skip or bool(skipped)
        for idx in skipped:
            exact = dtw_distance(query, data.values[idx], bands.band_for(int(data.labels[idx])))
            assert exact >= best - 1e-12
    assert saw_skip, "pruning never fired; the test is vacuous"


def test_query_length_validated():
    rng = np.random.default_rng(3)
    data = random_dataset(rng, n_items=4, length=8)
    model = ClassifierModel(data, uniform_bandset(data.label_set, 8, 0), 1.0)
    with pytest.raises(ValueError):
        predict_1nn(model, np.zeros(9))


def test_model_validates_inputs():
    rng = np.random.default_rng(4)
    data = random_dataset(rng, n_items=4, length=8)
    with pytest.raises(ValueError):
        ClassifierModel(data, uniform_bandset(data.label_set, 9, 0), 1.0)
    with pytest.raises(ValueError):
        ClassifierModel(data, BandSet({0: zero_band(8)}), 1.0)  # class 1 missing
    with pytest.raises(ValueError):
        ClassifierModel(data, uniform_bandset(data.label_set, 8, 0), 1.5)


def test_loo_identical_items():
    data = LabeledDataset(np.ones((4, 6)), [2, 2, 2, 2])
    assert loo_accuracy(data, BandSet({2: zero_band(6)})) == 1.0


def test_loo_two_items_opposite_labels():
    data = LabeledDataset(np.array([[0.0, 0.0], [1.0, 1.0]]), [0, 1])
    assert loo_accuracy(data, uniform_bandset((0, 1), 2, 0)) == 0.0


def test_loo_separated_classes():
    rng = np.random.default_rng(5)
    low = rng.normal(0.0, 0.5, size=(5, 8))
    high = rng.normal(100.0, 0.5, size=(5, 8))
    data = LabeledDataset(np.vstack([low, high]), [0] * 5 + [1] * 5)
    assert loo_accuracy(data, uniform_bandset((0, 1), 8, 0)) == 1.0


def test_loo_matches_euclidean_under_zero_band():
    rng = np.random.default_rng(6)
    data = random_dataset(rng, n_items=12, length=10, n_classes=3)
    bands = uniform_bandset(data.label_set, 10, 0)
    hits = 0
    for i in range(12):
        dists = np.sqrt(((data.values - data.values[i]) ** 2).sum(axis=1))
        dists[i] = math.inf
        hits += data.labels[int(np.argmin(dists))] == data.labels[i]
    assert loo_accuracy(data, bands) == pytest.approx(hits / 12)


def test_loo_requires_two_items():
    data = LabeledDataset(np.ones((1, 4)), [0])
    with pytest.raises(ValueError):
        loo_accuracy(data, BandSet({0: zero_band(4)}))


def test_loo_threaded_matches_serial():
    rng = np.random.default_rng(7)
    data = random_dataset(rng, n_items=10, length=12, n_classes=2)
    bands = _random_bandset(rng, data)
    assert loo_accuracy(data, bands, threads=4) == loo_accuracy(data, bands, threads=1)


def test_predict_many_order_threads_and_empty():
    rng = np.random.default_rng(8)
    data = random_dataset(rng, n_items=10, length=12, n_classes=2)
    model = build_model(data, uniform_bandset(data.label_set, 12, 10))
    queries = rng.normal(size=(15, 12))
    serial = predict_many(model, queries)
    assert serial.tolist() == [predict_1nn(model, q) for q in queries]
    assert np.array_equal(serial, predict_many(model, queries, threads=4))
    assert predict_many(model, np.empty((0, 0))).shape == (0,)


def test_build_model_records_loo_accuracy():
    rng = np.random.default_rng(9)
    data = random_dataset(rng, n_items=8, length=10, n_classes=2)
    bands = _random_bandset(rng, data)
    model = build_model(data, bands)
    assert model.predicted_accuracy == loo_accuracy(data, bands)


def test_pipeline_empty_test_set():
    rng = np.random.default_rng(10)
    data = shifted_sines(rng, per_class=3, length=16)
    predictions, accuracy, model = run_pipeline(data, np.empty((0, 0)), 9.0, 100, seed=0)
    assert predictions.shape == (0,)
    assert 0.0 <= accuracy <= 1.0
    assert model.train.series_length == 16


def test_pipeline_composes_the_parts():
    from rkdtw import learn_best_band

    rng = np.random.default_rng(11)
    data = shifted_sines(rng, per_class=3, length=16)
    queries = rng.normal(size=(5, 16))
    predictions, accuracy, model = run_pipeline(data, queries, math.inf, 100, seed=3)
    assert len(predictions) == 5
    bands, _, _ = learn_best_band(data, 16, seed=3)
    for label in data.label_set:
        assert model.bands.band_for(label).r.tolist() == bands.band_for(label).r.tolist()
    assert accuracy == loo_accuracy(data, bands)
    assert np.array_equal(predictions, predict_many(build_model(data, bands), queries))


def test_pipeline_resamples_when_over_threshold():
    rng = np.random.default_rng(12)
    data = shifted_sines(rng, per_class=6, length=64)
    queries = rng.normal(size=(3, 64))
    # 2*log10(12*64) = 5.77 > 5.0, so one halving lands at length 32
    predictions, _, model = run_pipeline(data, queries, 5.2, 50, seed=0)
    assert model.train.series_length == 32
    assert model.bands.n == 32
    assert len(predictions) == 3


def test_pipeline_validates_inputs():
    rng = np.random.default_rng(13)
    data = shifted_sines(rng, per_class=3, length=16)
    with pytest.raises(ValueError):
        run_pipeline(data, rng.normal(size=(2, 9)), 9.0, 100)
    with pytest.raises(ValueError):
        run_pipeline(data, np.empty((0, 0)), 9.0, 101)
