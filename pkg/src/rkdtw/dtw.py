"""Band-constrained DTW distance, optimal-path backtracking, and LB_Keogh.

The accumulated-cost recurrence adds the squared sample difference at each
cell to the cheapest of the three predecessor cells; disallowed cells hold
+inf. The distance is the square root of the accumulated cost at the final
cell, i.e. the minimum over band-feasible monotone paths of
sqrt(sum of squared differences along the path).
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .bands import RKBand


@njit(cache=True, nogil=True)
def _accumulated_sq(q, c, mask):
    """Final accumulated squared cost, rolling two-row buffer."""
    n = q.shape[0]
    prev = np.full(n, np.inf)
    curr = np.full(n, np.inf)
    for i in range(n):
        for j in range(n):
            if not mask[i, j]:
                curr[j] = np.inf
                continue
            d = q[i] - c[j]
            d = d * d
            if i == 0 and j == 0:
                curr[j] = d
                continue
            best = np.inf
            if i > 0 and j > 0 and prev[j - 1] < best:
                best = prev[j - 1]
            if j > 0 and curr[j - 1] < best:
                best = curr[j - 1]
            if i > 0 and prev[j] < best:
                best = prev[j]
            curr[j] = d + best
        prev, curr = curr, prev
    return prev[n - 1]


@njit(cache=True, nogil=True)
def _accumulated_matrix(q, c, mask):
    """Full accumulated-cost grid; +inf marks disallowed or unreachable cells."""
    n = q.shape[0]
    gamma = np.full((n, n), np.inf)
    for i in range(n):
        for j in range(n):
            if not mask[i, j]:
                continue
            d = q[i] - c[j]
            d = d * d
            if i == 0 and j == 0:
                gamma[0, 0] = d
                continue
            best = np.inf
            if i > 0 and j > 0 and gamma[i - 1, j - 1] < best:
                best = gamma[i - 1, j - 1]
            if j > 0 and gamma[i, j - 1] < best:
                best = gamma[i, j - 1]
            if i > 0 and gamma[i - 1, j] < best:
                best = gamma[i - 1, j]
            gamma[i, j] = d + best
    return gamma


def _check_pair(q, c, band: RKBand) -> tuple[np.ndarray, np.ndarray]:
    q = np.ascontiguousarray(q, dtype=np.float64)
    c = np.ascontiguousarray(c, dtype=np.float64)
    if q.ndim != 1 or c.ndim != 1:
        raise ValueError("series must be 1-D")
    if q.shape[0] != c.shape[0] or q.shape[0] != band.n:
        raise ValueError(
            f"lengths must match the band: got {q.shape[0]}, {c.shape[0]}, band {band.n}"
        )
    return q, c


def cost_matrix(q, c, band: RKBand) -> np.ndarray:
    """Accumulated-cost grid for ``q`` against ``c`` under the band."""
    q, c = _check_pair(q, c, band)
    return _accumulated_matrix(q, c, band.mask())


def dtw_distance(q, c, band: RKBand) -> float:
    """Band-constrained DTW distance between two equal-length series.

    With an all-zero band only the diagonal is feasible and the result is
    the Euclidean distance; with an all-``n`` band it is the unconstrained
    DTW distance. The diagonal is feasible under every band, so the result
    is always finite.
    """
    q, c = _check_pair(q, c, band)
    return float(np.sqrt(_accumulated_sq(q, c, band.mask())))


def _backtrack(gamma: np.ndarray) -> np.ndarray:
    n = gamma.shape[0]
    i = n - 1
    j = n - 1
    cells = [(i, j)]
    while i != 0 or j != 0:
        best = np.inf
        bi = bj = -1
        # Tie order: diagonal, then same-row, then same-column predecessor.
        if i > 0 and j > 0 and gamma[i - 1, j - 1] < best:
            best, bi, bj = gamma[i - 1, j - 1], i - 1, j - 1
        if j > 0 and gamma[i, j - 1] < best:
            best, bi, bj = gamma[i, j - 1], i, j - 1
        if i > 0 and gamma[i - 1, j] < best:
            best, bi, bj = gamma[i - 1, j], i - 1, j
        i, j = bi, bj
        cells.append((i, j))
    cells.reverse()
    return np.asarray(cells, dtype=np.int64)


def dtw_path(q, c, band: RKBand) -> np.ndarray:
    """One optimal warping path as a (K, 2) array of (row, column) cells.

    Backtracks from the final cell, preferring the cheapest predecessor;
    ties pick the diagonal first, making the path deterministic.
    """
    q, c = _check_pair(q, c, band)
    gamma = _accumulated_matrix(q, c, band.mask())
    return _backtrack(gamma)


def band_envelope(c, band: RKBand) -> tuple[np.ndarray, np.ndarray]:
    """Pointwise (lower, upper) hull of ``c`` over the band-admitted cells.

    ``upper[i]`` / ``lower[i]`` are the extremes of ``c[j]`` over all ``j``
    the band allows to align with index ``i``.
    """
    c = np.ascontiguousarray(c, dtype=np.float64)
    if c.shape[0] != band.n:
        raise ValueError(f"series length {c.shape[0]} does not match band length {band.n}")
    return _envelope_from_mask(c, band.mask())


def _envelope_from_mask(c: np.ndarray, mask: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    row = c[np.newaxis, :]
    upper = np.where(mask, row, -np.inf).max(axis=1)
    lower = np.where(mask, row, np.inf).min(axis=1)
    return lower, upper


def _lb_sq(q: np.ndarray, lower: np.ndarray, upper: np.ndarray) -> float:
    out = np.maximum(q - upper, 0.0) + np.minimum(q - lower, 0.0)
    return float(np.dot(out, out))


def lb_keogh(q, c, band: RKBand) -> float:
    """LB_Keogh lower bound on ``dtw_distance(q, c, band)``.

    Sums the squared excursion of ``q`` outside the band envelope of ``c``.
    Under the all-zero band the envelope degenerates to ``c`` itself and the
    bound equals the Euclidean distance exactly.
    """
    q, c = _check_pair(q, c, band)
    lower, upper = band_envelope(c, band)
    return float(np.sqrt(_lb_sq(q, lower, upper)))
