"""Global warping constraints for DTW.

A band stores one non-negative width ``r[i]`` per diagonal index. The
width acts both upward (cells ``(i, j)`` with ``j - i <= r[i]``) and downward
(``i - j <= r[j]``), so the constraint region is symmetric about the diagonal
and the diagonal itself is always feasible. ``r = 0`` everywhere degenerates
to the Euclidean distance; ``r = n`` everywhere removes the constraint. A
band set assigns one band to each class label.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RKBand:
    """Per-diagonal-index warping widths for series of length ``n``.

    Widths at or above ``n`` are legal and equivalent to ``n`` — the matrix
    simply ends there — so growing a band never needs a special cap.
    """

    r: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.r)
        if r.ndim != 1 or r.shape[0] < 1:
            raise ValueError(f"band widths must be a non-empty 1-D array, got shape {r.shape}")
        if not np.issubdtype(r.dtype, np.integer):
            if not np.all(r == r.astype(np.int64)):
                raise ValueError("band widths must be integers")
        r = r.astype(np.int64)
        if np.any(r < 0):
            raise ValueError("band widths must be non-negative")
        r = r.copy()
        r.flags.writeable = False
        object.__setattr__(self, "r", r)

    @property
    def n(self) -> int:
        return self.r.shape[0]

    def mask(self) -> np.ndarray:
        """Boolean n x n matrix of cells admitted by the band."""
        idx = np.arange(self.n)
        i = idx[:, np.newaxis]
        j = idx[np.newaxis, :]
        above = (j >= i) & (j - i <= self.r[:, np.newaxis])
        below = (i >= j) & (i - j <= self.r[np.newaxis, :])
        return above | below


def sakoe_chiba(n: int, width_percent: int) -> RKBand:
    """Uniform band whose width is ``width_percent`` percent of the length.

    Width 0 admits only the diagonal (Euclidean distance); width 100 admits
    the whole matrix (unconstrained DTW). Rounding is half-up.
    """
    if not 0 <= width_percent <= 100:
        raise ValueError(f"width_percent must be in [0, 100], got {width_percent}")
    radius = int(math.floor(n * width_percent / 100.0 + 0.5))
    radius = min(max(radius, 0), n)
    return RKBand(np.full(n, radius, dtype=np.int64))


def full_band(n: int) -> RKBand:
    """Band admitting every cell (unconstrained DTW)."""
    return RKBand(np.full(n, n, dtype=np.int64))


def zero_band(n: int) -> RKBand:
    """Diagonal-only band (Euclidean distance)."""
    return RKBand(np.zeros(n, dtype=np.int64))


def cell_allowed(band: RKBand, i: int, j: int) -> bool:
    """Whether the band admits matrix cell ``(i, j)`` (0-based indices)."""
    n = band.n
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"cell ({i}, {j}) outside a {n} x {n} matrix")
    if j >= i:
        if j - i <= band.r[i]:
            return True
    if i >= j:
        if i - j <= band.r[j]:
            return True
    return False


def adjust_segment(
    band: RKBand, start: int, end: int, direction: str, bound: int
) -> tuple[RKBand, bool]:
    """Grow or shrink every width in the inclusive segment ``[start, end]`` by 1.

    The adjustment is all-or-nothing: if growing any width would exceed
    ``bound``, or shrinking any would go below 0, the band is returned
    unchanged with ``adjustable=False``. A successful adjustment is exactly
    undone by the opposite direction on the same segment.
    """
    n = band.n
    if not (0 <= start <= end < n):
        raise IndexError(f"segment [{start}, {end}] invalid for band of length {n}")
    if bound < 0:
        raise ValueError(f"bound must be non-negative, got {bound}")
    if direction == "grow":
        if np.any(band.r[start : end + 1] + 1 > bound):
            return band, False
        delta = 1
    elif direction == "shrink":
        if np.any(band.r[start : end + 1] - 1 < 0):
            return band, False
        delta = -1
    else:
        raise ValueError(f"direction must be 'grow' or 'shrink', got {direction!r}")
    r = band.r.copy()
    r[start : end + 1] += delta
    return RKBand(r), True


@dataclass(frozen=True)
class BandSet:
    """One band per class label, all constraining the same length."""

    bands: dict[int, RKBand]

    def __post_init__(self):
        if not self.bands:
            raise ValueError("band set must contain at least one band")
        bands = {int(label): band for label, band in self.bands.items()}
        lengths = {band.n for band in bands.values()}
        if len(lengths) != 1:
            raise ValueError(f"all bands must share one length, got {sorted(lengths)}")
        object.__setattr__(self, "bands", bands)

    @property
    def n(self) -> int:
        return next(iter(self.bands.values())).n

    @property
    def labels(self) -> tuple[int, ...]:
        return tuple(sorted(self.bands))

    def band_for(self, label: int) -> RKBand:
        return self.bands[int(label)]

    def replace(self, label: int, band: RKBand) -> "BandSet":
        """New band set with the band of ``label`` swapped out."""
        label = int(label)
        if label not in self.bands:
            raise KeyError(label)
        new = dict(self.bands)
        new[label] = band
        return BandSet(new)


def uniform_bandset(labels, n: int, width_percent: int) -> BandSet:
    """The same Sakoe-Chiba band for every class label."""
    band = sakoe_chiba(n, width_percent)
    return BandSet({int(label): band for label in labels})


def bandset_to_json(bands: BandSet) -> str:
    """Serialize a band set to the portable JSON document form."""
    payload = {
        "n": bands.n,
        "bands": {str(label): bands.band_for(label).r.tolist() for label in bands.labels},
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def bandset_from_json(text: str) -> BandSet:
    """Parse a band set from its JSON document form."""
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"invalid band JSON: {exc}") from None
    if not isinstance(payload, dict) or "n" not in payload or "bands" not in payload:
        raise ValueError("band JSON must be an object with 'n' and 'bands' keys")
    n = int(payload["n"])
    bands = {}
    for label, widths in payload["bands"].items():
        r = np.asarray(widths, dtype=np.int64)
        if r.shape != (n,):
            raise ValueError(
                f"band for class {label} has "
                f"{r.shape[0] if r.ndim == 1 else '?'} widths, expected {n}"
            )
        bands[int(label)] = RKBand(r)
    return BandSet(bands)
