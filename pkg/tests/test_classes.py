import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parseid.classes import (
    ALL_CLASSES,
    BACKGROUND,
    CLASS_BY_KEY,
    MergedClass,
    class_key,
    merge_labels,
)


def test_fifteen_classes():
    assert len(ALL_CLASSES) == 15
    assert MergedClass.UPPER_CLOTHES == 5
    assert MergedClass.PANTS == 9


def test_merge_mapping():
    raw = np.array([[0, 5, 6, 7, 10, 12, 9, 13]], dtype=np.uint8)
    merged = merge_labels(raw)
    assert merged.tolist() == [[0, 5, 5, 5, 5, 9, 9, 13]]


def test_merge_leaves_other_labels_alone():
    raw = np.array([1, 2, 3, 4, 8, 11, 14, 15, 16, 17, 18, 19], dtype=np.uint8)
    assert np.array_equal(merge_labels(raw), raw)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_merge_idempotent(seed):
    rng = np.random.default_rng(seed)
    raw = rng.integers(0, 20, size=(17, 13)).astype(np.uint8)
    once = merge_labels(raw)
    assert np.array_equal(merge_labels(once), once)
    # everything lands on background or a retained class
    assert set(np.unique(once)) <= {BACKGROUND, *(int(c) for c in ALL_CLASSES)}


def test_class_key_names():
    assert class_key(5) == "upper_clothes"
    assert class_key(18) == "left_shoe"
    assert CLASS_BY_KEY["pants"] == MergedClass.PANTS


def test_class_key_rejects_dropped_ids():
    with pytest.raises(ValueError):
        class_key(6)  # dress merges away and has no key of its own
