import numpy as np
import pytest

from rkdtw import (
    BandSet,
    RKBand,
    adjust_segment,
    bandset_from_json,
    bandset_to_json,
    cell_allowed,
    full_band,
    sakoe_chiba,
    uniform_bandset,
    zero_band,
)

from oracles import allowed_cells


def test_band_validation():
    with pytest.raises(ValueError):
        RKBand(np.array([-1, 0, 0]))
    with pytest.raises(ValueError):
        RKBand(np.array([0.5, 0.0]))
    with pytest.raises(ValueError):
        RKBand(np.zeros((2, 2)))


def test_band_widths_above_length_act_unconstrained():
    # any width >= n admits the whole row/column, same as width n
    big = RKBand(np.array([9, 9, 9]))
    assert np.array_equal(big.mask(), full_band(3).mask())


def test_band_widths_immutable():
    band = RKBand(np.array([1, 1, 1]))
    with pytest.raises(ValueError):
        band.r[0] = 2


def test_sakoe_chiba_uniform():
    assert sakoe_chiba(100, 10).r.tolist() == [10] * 100
    assert sakoe_chiba(17, 0).r.tolist() == [0] * 17
    assert sakoe_chiba(17, 100).r.tolist() == [17] * 17


def test_sakoe_chiba_rounds_half_up():
    assert sakoe_chiba(10, 25).r[0] == 3  # 2.5 rounds up
    assert sakoe_chiba(10, 24).r[0] == 2
    assert sakoe_chiba(6, 25).r[0] == 2  # 1.5 rounds up


def test_sakoe_chiba_rejects_bad_width():
    with pytest.raises(ValueError):
        sakoe_chiba(10, 101)
    with pytest.raises(ValueError):
        sakoe_chiba(10, -1)


def test_diagonal_always_allowed():
    rng = np.random.default_rng(0)
    for _ in range(20):
        n = int(rng.integers(2, 12))
        band = RKBand(rng.integers(0, n + 1, size=n))
        assert all(cell_allowed(band, i, i) for i in range(n))


def test_zero_band_is_diagonal_only():
    band = zero_band(6)
    assert not cell_allowed(band, 1, 4)
    assert np.array_equal(band.mask(), np.eye(6, dtype=bool))


def test_full_band_allows_everything():
    assert full_band(5).mask().all()


def test_cell_allowed_matches_rule_and_transpose():
    rng = np.random.default_rng(1)
    for _ in range(30):
        n = int(rng.integers(2, 10))
        r = rng.integers(0, n + 1, size=n)
        band = RKBand(r)
        expected = allowed_cells(r)
        mask = band.mask()
        assert np.array_equal(mask, expected)
        assert np.array_equal(mask, mask.T)
        for i in range(n):
            for j in range(n):
                assert cell_allowed(band, i, j) == expected[i, j]


def test_cell_allowed_index_error():
    band = zero_band(4)
    with pytest.raises(IndexError):
        cell_allowed(band, 0, 4)
    with pytest.raises(IndexError):
        cell_allowed(band, -1, 0)


def test_sakoe_chiba_nesting():
    # narrower widths admit a subset of the wider widths' cells
    for n in (7, 20):
        prev = sakoe_chiba(n, 0).mask()
        for width in range(5, 101, 5):
            cur = sakoe_chiba(n, width).mask()
            assert (prev <= cur).all()
            prev = cur


def test_adjust_grow():
    band, ok = adjust_segment(RKBand(np.array([3, 3, 3])), 0, 2, "grow", 10)
    assert ok
    assert band.r.tolist() == [4, 4, 4]


def test_adjust_shrink_blocked_at_zero():
    original = RKBand(np.array([0, 2, 0]))
    band, ok = adjust_segment(original, 0, 2, "shrink", 3)
    assert not ok
    assert band.r.tolist() == [0, 2, 0]


def test_adjust_grow_blocked_at_bound():
    band, ok = adjust_segment(RKBand(np.array([5, 5])), 0, 1, "grow", 5)
    assert not ok
    assert band.r.tolist() == [5, 5]


def test_adjust_partial_segment():
    band, ok = adjust_segment(RKBand(np.array([1, 1, 1, 1])), 1, 2, "grow", 4)
    assert ok
    assert band.r.tolist() == [1, 2, 2, 1]


def test_adjust_roundtrip_identity():
    rng = np.random.default_rng(2)
    for _ in range(50):
        n = int(rng.integers(2, 12))
        band = RKBand(rng.integers(0, n + 1, size=n))
        start = int(rng.integers(0, n))
        end = int(rng.integers(start, n))
        direction = "grow" if rng.integers(2) else "shrink"
        opposite = "shrink" if direction == "grow" else "grow"
        adjusted, ok = adjust_segment(band, start, end, direction, n)
        if not ok:
            assert adjusted.r.tolist() == band.r.tolist()
            continue
        back, ok_back = adjust_segment(adjusted, start, end, opposite, n)
        assert ok_back
        assert back.r.tolist() == band.r.tolist()


def test_adjust_errors():
    band = zero_band(4)
    with pytest.raises(IndexError):
        adjust_segment(band, 2, 1, "grow", 4)
    with pytest.raises(IndexError):
        adjust_segment(band, 0, 4, "grow", 4)
    with pytest.raises(ValueError):
        adjust_segment(band, 0, 1, "sideways", 4)
    with pytest.raises(ValueError):
        adjust_segment(band, 0, 1, "grow", -1)


def test_bandset_basics():
    bands = BandSet({1: zero_band(4), 0: full_band(4)})
    assert bands.labels == (0, 1)
    assert bands.n == 4
    assert bands.band_for(1).r.tolist() == [0, 0, 0, 0]
    replaced = bands.replace(1, full_band(4))
    assert replaced.band_for(1).r.tolist() == [4, 4, 4, 4]
    assert bands.band_for(1).r.tolist() == [0, 0, 0, 0]  # original untouched
    with pytest.raises(KeyError):
        bands.replace(7, zero_band(4))


def test_bandset_validation():
    with pytest.raises(ValueError):
        BandSet({})
    with pytest.raises(ValueError):
        BandSet({0: zero_band(4), 1: zero_band(5)})


def test_uniform_bandset():
    bands = uniform_bandset((0, 1, 5), 8, 25)
    assert bands.labels == (0, 1, 5)
    assert all(bands.band_for(lab).r.tolist() == [2] * 8 for lab in bands.labels)


def test_bandset_json_roundtrip():
    rng = np.random.default_rng(3)
    bands = BandSet({k: RKBand(rng.integers(0, 7, size=6)) for k in (0, 3, 9)})
    text = bandset_to_json(bands)
    parsed = bandset_from_json(text)
    assert parsed.labels == bands.labels
    for label in bands.labels:
        assert parsed.band_for(label).r.tolist() == bands.band_for(label).r.tolist()
    # serialization is canonical: a reparse emits identical bytes
    assert bandset_to_json(parsed) == text


def test_bandset_json_rejects_garbage():
    with pytest.raises(ValueError):
        bandset_from_json("not json")
    with pytest.raises(ValueError):
        bandset_from_json("[1, 2, 3]")
    with pytest.raises(ValueError):
        bandset_from_json('{"n": 3, "bands": {"0": [1, 2]}}')
