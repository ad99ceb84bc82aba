import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import brute
from parseid.texture import (
    MIN_CODES,
    N_CODES,
    ROTATION_MIN,
    LbpHistogram,
    dense36_to_lbp_bins,
    grayscale,
    lbp_bins_to_dense36,
    lbp_code,
    lbp_code_map,
    lbp_histograms,
    split_contour_inner,
    texture_similarity,
)


def test_grayscale_luma_weights():
    rgb = np.array([[[255, 0, 0], [0, 255, 0], [0, 0, 255], [100, 100, 100]]], dtype=np.uint8)
    assert grayscale(rgb).tolist() == [[76, 150, 29, 100]]


def test_rotation_table_has_36_codes():
    assert len(MIN_CODES) == 36
    # canonical codes are fixed points of the table
    assert np.array_equal(ROTATION_MIN[MIN_CODES], MIN_CODES)


def test_lbp_code_flat_region_is_zero():
    gray = np.full((3, 3), 100, dtype=np.uint8)
    assert lbp_code(gray, 1, 1) == 0
    gray[1, 1] = 99  # strictly-greater comparison: all neighbors set
    assert lbp_code(gray, 1, 1) == 255
    gray[1, 1] = 100
    gray[0, 0] = 101  # single brighter neighbor canonicalizes to code 1
    assert lbp_code(gray, 1, 1) == 1


def test_lbp_code_requires_interior_pixel():
    gray = np.zeros((3, 3), dtype=np.uint8)
    with pytest.raises(ValueError):
        lbp_code(gray, 0, 1)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=60, deadline=None)
def test_lbp_code_matches_reference(seed):
    rng = np.random.default_rng(seed)
    gray = rng.integers(0, 256, size=(5, 5)).astype(np.uint8)
    for row in range(1, 4):
        for col in range(1, 4):
            assert lbp_code(gray, row, col) == brute.lbp_code(gray.tolist(), row, col)


def test_lbp_code_map_matches_pointwise():
    rng = np.random.default_rng(3)
    gray = rng.integers(0, 256, size=(9, 7)).astype(np.uint8)
    codes = lbp_code_map(gray)
    assert codes[0, :].tolist() == [0] * 7  # border ring carries no codes
    for row in range(1, 8):
        for col in range(1, 6):
            assert codes[row, col] == lbp_code(gray, row, col)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_lbp_codes_invariant_under_monotone_map(seed):
    # codes depend only on the ordering of intensities, so any strictly
    # increasing remap of the gray levels keeps the code map fixed
    rng = np.random.default_rng(seed)
    gray = rng.integers(0, 128, size=(8, 8)).astype(np.uint8)
    remapped = (gray.astype(np.uint16) * 2 + 1).astype(np.uint8)
    assert np.array_equal(lbp_code_map(gray), lbp_code_map(remapped))


def test_split_contour_inner_partitions_region():
    region = np.zeros((8, 8), dtype=bool)
    region[2:6, 2:6] = True
    contour, inner = split_contour_inner(region)
    assert not (contour & inner).any()
    assert np.array_equal(contour | inner, region)
    assert inner.sum() == 4  # the 2x2 core
    assert contour.sum() == 12


def test_split_contour_inner_raster_border_counts_as_outside():
    region = np.ones((3, 5), dtype=bool)
    contour, inner = split_contour_inner(region)
    # the raster border ring is contour; only the middle of the center row
    # has all four neighbors inside the region
    assert inner.sum() == 3
    assert contour.sum() == 12


def test_lbp_histograms_normalized_and_counted():
    rng = np.random.default_rng(11)
    gray = rng.integers(0, 256, size=(16, 16)).astype(np.uint8)
    region = np.zeros((16, 16), dtype=bool)
    region[4:12, 4:12] = True
    contour, inner = lbp_histograms(gray, region)
    assert contour.region == "contour" and inner.region == "inner"
    assert contour.n_codes == 28 and inner.n_codes == 36
    assert contour.bins.sum() == pytest.approx(1.0)
    assert inner.bins.sum() == pytest.approx(1.0)
    # only canonical codes may be populated
    populated = np.flatnonzero(contour.bins + inner.bins)
    assert set(populated) <= set(int(c) for c in MIN_CODES)


def test_lbp_histograms_empty_region_is_absent():
    gray = np.zeros((6, 6), dtype=np.uint8)
    region = np.zeros((6, 6), dtype=bool)
    region[0, 0] = True  # raster border only: no valid neighborhoods
    contour, inner = lbp_histograms(gray, region)
    assert contour.n_codes == 0 and inner.n_codes == 0
    assert not contour.bins.any() and not inner.bins.any()


def test_texture_similarity_hand_values():
    a = np.zeros(N_CODES)
    b = np.zeros(N_CODES)
    a[0], a[1] = 0.5, 0.5
    b[0], b[3] = 0.25, 0.75
    s = texture_similarity(
        LbpHistogram("inner", a, 10), LbpHistogram("inner", b, 10)
    )
    assert s == pytest.approx(0.25)
    assert texture_similarity(LbpHistogram("inner", a, 10), LbpHistogram("inner", a, 99)) == pytest.approx(1.0)


def test_texture_similarity_absent_channel():
    a = LbpHistogram("inner", np.zeros(N_CODES), 0)
    b = LbpHistogram("inner", np.full(N_CODES, 1.0 / N_CODES), 50)
    assert texture_similarity(a, b) is None
    assert texture_similarity(b, a) is None


def test_dense36_roundtrip():
    rng = np.random.default_rng(5)
    bins = np.zeros(N_CODES)
    values = rng.random(len(MIN_CODES))
    bins[MIN_CODES] = values / values.sum()
    assert np.array_equal(dense36_to_lbp_bins(lbp_bins_to_dense36(bins)), bins)


def _rotate_pair(gray, region, k):
    return np.rot90(gray, k).copy(), np.rot90(region, k).copy()


@given(st.integers(0, 2**32 - 1), st.integers(1, 3))
@settings(max_examples=40, deadline=None)
def test_rotation_leaves_histograms_identical(seed, k):
    rng = np.random.default_rng(seed)
    gray = rng.integers(0, 256, size=(12, 12)).astype(np.uint8)
    region = np.zeros((12, 12), dtype=bool)
    region[3:10, 2:9] = True
    base = lbp_histograms(gray, region)
    rotated = lbp_histograms(*_rotate_pair(gray, region, k))
    for h1, h2 in zip(base, rotated):
        assert h1.n_codes == h2.n_codes
        assert np.array_equal(h1.bins, h2.bins)
