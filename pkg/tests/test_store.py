"""Feature store: on-disk round trips, versioning, and bulk extraction."""

import json
import random
import shutil

import pytest

import brute
from parseid.store import (
    BuildReport,
    FeatureStore,
    build_from_dataset,
    list_dataset_images,
    record_from_dict,
    record_to_dict,
)
from parseid.errors import StoreError, VersionConflictError


@pytest.fixture
def store(tmp_path):
    return FeatureStore.create(tmp_path / "store", "test")


def test_create_then_reopen(tmp_path):
    FeatureStore.create(tmp_path / "s", "abc123")
    reopened = FeatureStore(tmp_path / "s")
    assert reopened.extractor_version == "abc123"
    assert len(reopened) == 0


def test_create_refuses_existing(tmp_path):
    FeatureStore.create(tmp_path / "s", "v")
    with pytest.raises(StoreError, match="already exists"):
        FeatureStore.create(tmp_path / "s", "v")


def test_open_missing_index(tmp_path):
    with pytest.raises(StoreError, match="index.json"):
        FeatureStore(tmp_path / "nowhere")


def test_open_or_create(tmp_path):
    first = FeatureStore.open_or_create(tmp_path / "s", "test")
    rng = random.Random(1)
    first.put(brute.random_record(rng, "a", min_classes=3))
    again = FeatureStore.open_or_create(tmp_path / "s", "ignored")
    assert again.extractor_version == "test"
    assert "a" in again


def test_unreadable_format_version(tmp_path):
    FeatureStore.create(tmp_path / "s", "v")
    index_path = tmp_path / "s" / "index.json"
    index = json.loads(index_path.read_text())
    index["format_version"] = 999
    index_path.write_text(json.dumps(index))
    with pytest.raises(StoreError, match="format_version"):
        FeatureStore(tmp_path / "s")


def test_round_trip_is_exact(store):
    rng = random.Random(2)
    for i in range(20):
        rec = brute.random_record(rng, f"img_{i:04d}")
        store.put(rec)
        back = store.get(rec.image_id)
        assert record_to_dict(back) == record_to_dict(rec)
        assert back.person_id == rec.person_id
        assert back.camera_id == rec.camera_id


def test_round_trip_survives_reopen(store, tmp_path):
    rng = random.Random(3)
    recs = [brute.random_record(rng, f"r{i}") for i in range(5)]
    store.put_many(recs)
    reopened = FeatureStore(store.path)
    assert len(reopened) == 5
    for rec in recs:
        assert record_to_dict(reopened.get(rec.image_id)) == record_to_dict(rec)
        assert reopened.metadata(rec.image_id) == {
            "person_id": rec.person_id,
            "camera_id": rec.camera_id,
        }


def test_get_dict_is_verbatim_stored_json(store):
    rng = random.Random(4)
    rec = brute.random_record(rng, "x")
    store.put(rec)
    assert store.get_dict("x") == record_to_dict(rec)


def test_get_unknown_id(store):
    with pytest.raises(KeyError):
        store.get("missing")
    with pytest.raises(KeyError):
        store.get_dict("missing")


def test_duplicate_put_rejected_unless_overwrite(store):
    rng = random.Random(5)
    rec = brute.random_record(rng, "dup")
    store.put(rec)
    with pytest.raises(StoreError, match="already stored"):
        store.put(rec)
    replacement = brute.random_record(rng, "dup")
    store.put(replacement, overwrite=True)
    assert store.get_dict("dup") == record_to_dict(replacement)


def test_version_conflict(store):
    rng = random.Random(6)
    rec = brute.random_record(rng, "v")  # extractor_version "test" matches
    store.put(rec)
    from dataclasses import replace

    alien = replace(rec, image_id="w", extractor_version="other")
    with pytest.raises(VersionConflictError, match="other"):
        store.put(alien)


@pytest.mark.parametrize("bad_id", ["../up", "a/b", "", ".hidden", "sp ace"])
def test_unstorable_ids_rejected(store, bad_id):
    rng = random.Random(7)
    from dataclasses import replace

    rec = replace(brute.random_record(rng, "ok"), image_id=bad_id)
    with pytest.raises(StoreError, match="not storable"):
        store.put(rec)


def test_image_ids_sorted_and_container_api(store):
    rng = random.Random(8)
    for name in ("c", "a", "b"):
        store.put(brute.random_record(rng, name))
    assert store.image_ids() == ["a", "b", "c"]
    assert "b" in store
    assert "z" not in store
    assert len(store) == 3
    assert [r.image_id for r in store.records()] == ["a", "b", "c"]


def test_record_dict_round_trip_direct():
    rng = random.Random(9)
    rec = brute.random_record(rng, "direct", min_classes=5)
    d = record_to_dict(rec)
    assert record_to_dict(record_from_dict(d)) == d
    # stored form survives a JSON round trip bit for bit
    assert json.loads(json.dumps(d)) == d


# ---------------------------------------------------------------------------
# Bulk extraction


@pytest.fixture
def small_dataset(dataset_dirs, tmp_path):
    """First few image/mask pairs of the synthetic corpus, copied out."""
    image_dir, mask_dir, _ = dataset_dirs
    small_images = tmp_path / "images"
    small_masks = tmp_path / "masks"
    small_images.mkdir()
    small_masks.mkdir()
    for path in list_dataset_images(image_dir)[:8]:
        shutil.copy(path, small_images / path.name)
        shutil.copy(mask_dir / f"{path.stem}.png", small_masks / path.name)
    return small_images, small_masks


def test_build_reports_and_stores(small_dataset, tmp_path):
    image_dir, mask_dir = small_dataset
    s = FeatureStore.create(tmp_path / "s1", "irrelevant")
    report = build_from_dataset(s, image_dir, mask_dir)
    assert isinstance(report, BuildReport)
    assert report.n_built == 8
    assert report.n_failed == 0
    assert report.n_skipped == 0
    assert len(s) == 8


def test_build_worker_count_changes_nothing(small_dataset, tmp_path):
    image_dir, mask_dir = small_dataset
    serial = FeatureStore.create(tmp_path / "serial", "irrelevant")
    forked = FeatureStore.create(tmp_path / "forked", "irrelevant")
    build_from_dataset(serial, image_dir, mask_dir, workers=1)
    build_from_dataset(forked, image_dir, mask_dir, workers=2)
    assert serial.image_ids() == forked.image_ids()
    for image_id in serial.image_ids():
        assert serial.get_dict(image_id) == forked.get_dict(image_id)


def test_build_rerun_skips_existing(small_dataset, tmp_path):
    image_dir, mask_dir = small_dataset
    s = FeatureStore.create(tmp_path / "s", "irrelevant")
    first = build_from_dataset(s, image_dir, mask_dir)
    before = {i: s.get_dict(i) for i in s.image_ids()}
    second = build_from_dataset(s, image_dir, mask_dir)
    assert second.n_built == 0
    assert second.n_skipped == first.n_built
    assert second.n_failed == 0
    assert {i: s.get_dict(i) for i in s.image_ids()} == before


def test_build_missing_mask_is_reported_not_stored(small_dataset, tmp_path):
    image_dir, mask_dir = small_dataset
    orphan = list_dataset_images(image_dir)[0]
    (mask_dir / orphan.name).unlink()
    s = FeatureStore.create(tmp_path / "s", "irrelevant")
    report = build_from_dataset(s, image_dir, mask_dir)
    assert report.n_built == 7
    assert report.n_failed == 1
    [(failed_path, reason)] = report.failures
    assert orphan.name in failed_path
    assert "mask" in reason.lower()
    assert orphan.stem not in s


def test_build_undecodable_image_is_reported(small_dataset, tmp_path):
    image_dir, mask_dir = small_dataset
    junk = image_dir / "zz_junk.png"
    junk.write_bytes(b"not a png at all")
    (mask_dir / "zz_junk.png").write_bytes(b"not a png either")
    s = FeatureStore.create(tmp_path / "s", "irrelevant")
    report = build_from_dataset(s, image_dir, mask_dir)
    assert report.n_built == 8
    assert report.n_failed == 1
    assert "zz_junk" in report.failures[0][0]
