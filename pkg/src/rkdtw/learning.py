"""Learning per-class warping bands.

Two learners are provided and the best silhouette score wins:

* boundary extraction: accumulate the optimal unconstrained warping paths of
  all ordered within-class pairs into a visit-count matrix, then derive a
  band per class from the off-diagonal offsets seen at each index (their
  maximum, rounded-up mean, or mode);
* iterative hill-climbing: start from the best uniform Sakoe-Chiba band,
  then repeatedly grow (forward) or shrink (backward) random band segments,
  keeping changes only when the global silhouette strictly improves and
  splitting rejected segments in half down to a length threshold.
"""

from __future__ import annotations

import logging
import math
import random
from typing import NamedTuple

import numpy as np

from .bands import BandSet, RKBand, adjust_segment, full_band, uniform_bandset, zero_band
from .dtw import _accumulated_matrix, _backtrack
from .series import LabeledDataset
from .silhouette import _fill_columns, _report_from_matrix, distance_table, evaluate

logger = logging.getLogger(__name__)


class SegmentTask(NamedTuple):
    """Inclusive 0-based band segment of one class, queued for adjustment."""

    start: int
    end: int
    label: int


class LearnLog:
    """Tab-separated record of every hill-climbing evaluation."""

    COLUMNS = ("step", "direction", "start", "end", "label", "before", "after", "accepted")

    def __init__(self):
        self.rows: list[tuple] = []

    def record(
        self,
        direction: str,
        start: int,
        end: int,
        label: int,
        before: float,
        after: float,
        accepted: bool,
    ) -> None:
        self.rows.append(
            (len(self.rows), direction, start, end, label, before, after, int(accepted))
        )

    def to_tsv(self) -> str:
        lines = ["\t".join(self.COLUMNS)]
        for row in self.rows:
            step, direction, start, end, label, before, after, accepted = row
            lines.append(
                f"{step}\t{direction}\t{start}\t{end}\t{label}\t{before!r}\t{after!r}\t{accepted}"
            )
        return "\n".join(lines) + "\n"


def path_matrix(data: LabeledDataset, label: int) -> np.ndarray:
    """Visit counts of the optimal unconstrained warping paths of all ordered
    within-class pairs of ``label``."""
    length = data.series_length
    counts = np.zeros((length, length), dtype=np.int64)
    members = data.members(label)
    mask = full_band(length).mask()
    for i in members:
        for j in members:
            if i == j:
                continue
            gamma = _accumulated_matrix(data.values[i], data.values[j], mask)
            path = _backtrack(gamma)
            counts[path[:, 0], path[:, 1]] += 1
    return counts


def _bands_from_counts(counts: np.ndarray) -> tuple[RKBand, RKBand, RKBand]:
    """Max, mean (rounded up), and mode bands from a path-visit matrix.

    The statistic at index i runs over the diagonal offsets |row - column| of
    all visited cells in row i and column i, weighted by visit count; the
    diagonal cell (i, i) is counted once. Mode ties pick the smaller offset.
    """
    length = counts.shape[0]
    r_max = np.zeros(length, dtype=np.int64)
    r_mean = np.zeros(length, dtype=np.int64)
    r_mode = np.zeros(length, dtype=np.int64)
    idx = np.arange(length)
    for i in range(length):
        offsets = np.abs(idx - i)
        weights = np.zeros(length, dtype=np.int64)
        np.add.at(weights, offsets, counts[i, :])
        col = counts[:, i].copy()
        col[i] = 0
        np.add.at(weights, offsets, col)
        total = int(weights.sum())
        if total == 0:
            continue
        visited = np.flatnonzero(weights)
        r_max[i] = visited[-1]
        weighted_sum = int(np.dot(visited, weights[visited]))
        r_mean[i] = -(-weighted_sum // total)
        r_mode[i] = int(np.argmax(weights))
    return RKBand(r_max), RKBand(r_mean), RKBand(r_mode)


def extract_boundary_bands(data: LabeledDataset, threads: int = 1) -> tuple[BandSet, float]:
    """Derive max/mean/mode boundary bands per class and keep the best-scoring set.

    Classes with a single member get the zero band. The max variant is
    evaluated first and later variants replace it only on strict improvement.
    """
    length = data.series_length
    variants: dict[str, dict[int, RKBand]] = {"max": {}, "mean": {}, "mode": {}}
    for label in data.label_set:
        if len(data.members(label)) < 2:
            zero = zero_band(length)
            variants["max"][label] = zero
            variants["mean"][label] = zero
            variants["mode"][label] = zero
            continue
        counts = path_matrix(data, label)
        band_max, band_mean, band_mode = _bands_from_counts(counts)
        variants["max"][label] = band_max
        variants["mean"][label] = band_mean
        variants["mode"][label] = band_mode

    best_bands: BandSet | None = None
    best_score = -math.inf
    for name in ("max", "mean", "mode"):
        candidate = BandSet(variants[name])
        score = evaluate(data, candidate, threads)
        if score > best_score:
            best_bands = candidate
            best_score = score
    return best_bands, best_score


def best_warping_window(data: LabeledDataset, bound: int = 100, threads: int = 1) -> int:
    """Best uniform Sakoe-Chiba width (percent), scanning ``bound`` down to 0.

    Equal scores prefer the smaller width. Widths that round to the same
    radius are evaluated once.
    """
    if not 0 <= bound <= 100:
        raise ValueError(f"bound must be a percent in [0, 100], got {bound}")
    scores_by_radius: dict[int, float] = {}
    best_score = -math.inf
    best_width = bound
    for width in range(bound, -1, -1):
        radius = int(math.floor(data.series_length * width / 100.0 + 0.5))
        if radius not in scores_by_radius:
            bandset = uniform_bandset(data.label_set, data.series_length, width)
            scores_by_radius[radius] = evaluate(data, bandset, threads)
        score = scores_by_radius[radius]
        if score >= best_score:
            best_score = score
            best_width = width
    return best_width


def hillclimb_learn(
    data: LabeledDataset,
    threshold: int,
    initial: BandSet,
    bound: int,
    direction: str,
    rng_seed: int,
    log: LearnLog | None = None,
    threads: int = 1,
) -> BandSet:
    """One randomized segment hill-climb over all class bands.

    A single queue holds (start, end, label) segments, seeded with the full
    range of every class. Segments are dequeued in seeded-random order and
    grown (forward) or shrunk (backward) by 1; a strict silhouette
    improvement keeps the change and re-enqueues the segment, otherwise the
    change is undone and the segment splits in half while
    (end - start) / 2 >= threshold. Returns the best band set seen.
    """
    if direction not in ("forward", "backward"):
        raise ValueError(f"direction must be 'forward' or 'backward', got {direction!r}")
    if threshold < 1:
        raise ValueError(f"threshold must be >= 1, got {threshold}")
    adjust_dir = "grow" if direction == "forward" else "shrink"
    length = data.series_length
    bands = initial
    matrix = distance_table(data, bands, threads)
    best = _report_from_matrix(matrix, data).global_index

    rng = random.Random(rng_seed)
    queue = [SegmentTask(0, length - 1, label) for label in data.label_set]
    cap = 10 * len(data.label_set) * length
    dequeues = 0
    while queue:
        if dequeues >= cap:
            logger.warning("hill-climb stopped at the %d-dequeue safety cap", cap)
            break
        dequeues += 1
        task = queue.pop(rng.randrange(len(queue)))
        new_band, adjustable = adjust_segment(
            bands.band_for(task.label), task.start, task.end, adjust_dir, bound
        )
        if not adjustable:
            continue
        columns = data.members(task.label)
        saved = matrix[:, columns].copy()
        _fill_columns(matrix, data.values, columns, new_band.mask())
        score = _report_from_matrix(matrix, data).global_index
        accepted = score > best
        if log is not None:
            log.record(direction, task.start, task.end, task.label, best, score, accepted)
        if accepted:
            bands = bands.replace(task.label, new_band)
            best = score
            queue.append(task)
        else:
            matrix[:, columns] = saved
            if (task.end - task.start) / 2 >= threshold:
                mid = (task.start + task.end) // 2
                queue.append(SegmentTask(task.start, mid - 1, task.label))
                queue.append(SegmentTask(mid, task.end, task.label))
    return bands


def iterative_learn(
    data: LabeledDataset,
    r_percent: int,
    bound: int,
    seed: int = 0,
    log: LearnLog | None = None,
    threads: int = 1,
) -> tuple[BandSet, float]:
    """Repeated two-direction hill-climbs with a halving segment threshold.

    Starts every class at the uniform Sakoe-Chiba band of ``r_percent``. Each
    round climbs forward and backward from the current bands and keeps the
    higher-scoring result; rounds that fail to improve strictly halve the
    threshold, and learning stops once it falls below 1.
    """
    length = data.series_length
    bands = uniform_bandset(data.label_set, length, r_percent)
    best = evaluate(data, bands, threads)
    threshold = length // 2
    rng = random.Random(seed)
    while threshold >= 1:
        forward = hillclimb_learn(
            data, threshold, bands, bound, "forward", rng.randrange(2**32), log, threads
        )
        backward = hillclimb_learn(
            data, threshold, bands, bound, "backward", rng.randrange(2**32), log, threads
        )
        forward_score = evaluate(data, forward, threads)
        backward_score = evaluate(data, backward, threads)
        if forward_score >= backward_score:
            bands, score = forward, forward_score
        else:
            bands, score = backward, backward_score
        if score > best:
            best = score
        else:
            threshold //= 2
    return bands, best


def learn_best_band(
    data: LabeledDataset,
    bound: int,
    seed: int = 0,
    log: LearnLog | None = None,
    threads: int = 1,
) -> tuple[BandSet, float, str]:
    """Run both learners and return the better band set, its score, and the
    winning learner's name ("extraction" or "iterative").

    ``bound`` caps band widths (in samples) during hill-climbing and, scaled
    to a percent of the length, bounds the uniform-width search that seeds
    it. Ties favor the extraction result.
    """
    length = data.series_length
    if not 0 <= bound <= length:
        raise ValueError(f"bound must be in [0, {length}], got {bound}")
    extracted, extracted_score = extract_boundary_bands(data, threads)
    percent = min(100, int(math.floor(100.0 * bound / length + 0.5)))
    width = best_warping_window(data, percent, threads)
    learned, learned_score = iterative_learn(data, width, bound, seed, log, threads)
    if learned_score > extracted_score:
        return learned, learned_score, "iterative"
    return extracted, extracted_score, "extraction"
