"""Acceptance gate: the deliverable criteria, one test per criterion.

Every criterion asserts at its stated tolerance and runtime bound; the
terminal summary (see conftest) prints one PASS/FAIL line per criterion.
Worker scaling is stated for a 4-core machine and skips on smaller hosts.
"""

import os
import random
import time

import numpy as np
import pytest

import brute
from parseid.attributes import AttributeEntry, AttributeQuery, search_by_attributes
from parseid.classes import MergedClass
from parseid.color import BinarizedHistogram, LabMean, N_BINS
from parseid.config import extractor_version
from parseid.evaluation import (
    RankingResult,
    average_precision,
    evaluate,
    load_split,
    mean_average_precision,
    rank_query,
    rank_r,
)
from parseid.features import ClassFeatures, ExtractionConfig, FeatureRecord, extract_features
from parseid.masks import parse_market_name
from parseid.scoring import (
    ClassWeights,
    GalleryMatrix,
    binary_hist_similarity,
    class_similarity,
    distance_similarity,
    order_by_score,
    pair_score,
    score_against_gallery,
    score_batch,
    texture_similarity,
)
from parseid.store import FeatureStore, build_from_dataset
from parseid.synthetic import (
    default_identities,
    generate_dataset,
    jittered_illumination,
    render_view,
    shirt_rgb,
)
from parseid.texture import MIN_CODES, N_CODES, LbpHistogram, lbp_histograms

TOL = 1e-9


def close(got, want, tol=TOL):
    if want is None or got is None:
        return got is None and want is None
    return abs(got - want) <= tol


def bench_records(count, seed, id_prefix="r"):
    """Bulk random records shaped like real extractions, drawn with numpy
    so tens of thousands build in seconds."""
    rng = np.random.default_rng(seed)
    all_classes = list(MergedClass)
    n_per = rng.integers(4, 9, size=count)
    total = int(n_per.sum())
    bits = rng.random((total, 3, N_BINS)) < 0.25
    means = rng.random((total, 3)) * 255.0
    tex_w = rng.random((total, 2, len(MIN_CODES)))
    tex_absent = rng.random((total, 2)) < 0.1
    tex_codes = rng.integers(1, 4000, size=(total, 2))
    over = rng.random(total) < 0.05
    min_codes = np.asarray([int(c) for c in MIN_CODES])

    def lbp(slot, which, region):
        bins = np.zeros(N_CODES)
        if tex_absent[slot, which]:
            return LbpHistogram(region=region, bins=bins, n_codes=0)
        w = tex_w[slot, which]
        bins[min_codes] = w / w.sum()
        return LbpHistogram(region=region, bins=bins, n_codes=int(tex_codes[slot, which]))

    records = []
    slot = 0
    for i in range(count):
        classes = {}
        for ci in rng.choice(len(all_classes), size=int(n_per[i]), replace=False):
            classes[all_classes[int(ci)]] = ClassFeatures(
                hist_l=BinarizedHistogram(channel="L", bits=bits[slot, 0], threshold_used=1.0),
                hist_a=BinarizedHistogram(channel="a", bits=bits[slot, 1], threshold_used=1.0),
                hist_b=BinarizedHistogram(channel="b", bits=bits[slot, 2], threshold_used=1.0),
                mean=LabMean(l=float(means[slot, 0]), a=float(means[slot, 1]), b=float(means[slot, 2])),
                over_highlighted=bool(over[slot]),
                lbp_contour=lbp(slot, 0, "contour"),
                lbp_inner=lbp(slot, 1, "inner"),
                n_pixels=64,
            )
            slot += 1
        records.append(
            FeatureRecord(
                image_id=f"{id_prefix}{i:06d}",
                classes=classes,
                extractor_version="bench",
                person_id=(i % 2000) + 1,
                camera_id=(i % 6) + 1,
            )
        )
    return records


def test_a1_equation_oracles():
    """Each scoring equation matches its brute-force twin on 1000 random
    inputs to 1e-9, in under 10 seconds."""
    rng = random.Random(101)
    start = time.monotonic()

    for _ in range(1000):
        b1, b2 = brute.random_bits(rng), brute.random_bits(rng)
        got = binary_hist_similarity(
            BinarizedHistogram(channel="L", bits=b1, threshold_used=1.0),
            BinarizedHistogram(channel="L", bits=b2, threshold_used=1.0),
        )
        assert close(got, brute.binary_similarity(b1, b2))

    for _ in range(1000):
        m1 = LabMean(l=rng.uniform(0, 255), a=rng.uniform(0, 255), b=rng.uniform(0, 255))
        m2 = LabMean(l=rng.uniform(0, 255), a=rng.uniform(0, 255), b=rng.uniform(0, 255))
        assert close(
            distance_similarity(m1, m2),
            brute.distance_similarity(m1.as_array(), m2.as_array()),
        )

    for _ in range(1000):
        h1 = brute.random_lbp(rng, "inner")
        h2 = brute.random_lbp(rng, "inner")
        got = texture_similarity(h1, h2)
        want = brute.texture_similarity(h1.bins, h1.n_codes, h2.bins, h2.n_codes)
        assert close(got, want)

    for _ in range(1000):
        f1 = brute.random_class_features(rng)
        f2 = brute.random_class_features(rng)
        assert close(class_similarity(f1, f2), brute.class_similarity(f1, f2))

    for i in range(1000):
        r1 = brute.random_record(rng, f"q{i}")
        r2 = brute.random_record(rng, f"g{i}")
        rep = pair_score(r1, r2)
        want_sim, want_simn = brute.pair_score(r1, r2)
        assert close(rep.s_sim, want_sim)
        assert close(rep.s_simn, want_simn)

    assert time.monotonic() - start < 10.0


def test_a2_metric_oracles():
    """rank_r and mAP agree with the brute AP/CMC oracle on 100 random
    20x200 score matrices to 1e-9, in under 5 seconds; the textbook AP hand
    case is pinned."""
    pinned = RankingResult("q", [("a", 3.0), ("b", 2.0), ("c", 1.0)])
    ap = average_precision(pinned, {"a", "c"}.__contains__)
    assert abs(ap - 0.5 * (1.0 + 2.0 / 3.0)) <= TOL

    start = time.monotonic()
    np_rng = np.random.default_rng(202)
    ids_per_query = [
        np.array([f"q{q:02d}g{j:03d}" for j in range(200)]) for q in range(20)
    ]
    for _ in range(100):
        scores = np_rng.random((20, 200))
        truth_matrix = np_rng.random((20, 200)) < 0.04
        results = []
        truth_fns = []
        global_truth = set()
        brute_flags = []
        brute_aps = []
        for q in range(20):
            ids = ids_per_query[q]
            row = scores[q]
            order = order_by_score(ids, row)
            results.append(
                RankingResult(
                    query_id=f"q{q:02d}",
                    ranked=[(str(ids[i]), float(row[i])) for i in order],
                )
            )
            true_ids = {str(ids[j]) for j in np.flatnonzero(truth_matrix[q])}
            truth_fns.append(true_ids.__contains__)
            global_truth |= true_ids

            b_order = brute.rank_order(row.tolist(), ids.tolist())
            flags = [bool(truth_matrix[q][i]) for i in b_order]
            brute_flags.append(flags)
            brute_aps.append(brute.average_precision(flags))

        for result, truth, want in zip(results, truth_fns, brute_aps):
            assert close(average_precision(result, truth), want)

        for r in (1, 5, 10, 20):
            counted = [
                rank_r(result, r, truth)
                for result, truth, want in zip(results, truth_fns, brute_aps)
                if want is not None
            ]
            lib_cmc = float(np.mean(counted)) if counted else 0.0
            assert close(lib_cmc, brute.cmc(brute_flags, r))

        lib_map = mean_average_precision(results, global_truth.__contains__)
        counted_aps = [ap for ap in brute_aps if ap is not None]
        want_map = sum(counted_aps) / len(counted_aps) if counted_aps else 0.0
        assert close(lib_map, want_map)

    assert time.monotonic() - start < 5.0


def test_a3_end_to_end_self_retrieval(tmp_path):
    """20 identities x 4 views, generated, extracted, and evaluated from
    scratch: rank-1 must be 100% inside 30 seconds."""
    start = time.monotonic()
    image_dir, mask_dir = tmp_path / "images", tmp_path / "masks"
    generate_dataset(image_dir, mask_dir)
    store = FeatureStore.create(tmp_path / "store", extractor_version())
    report = build_from_dataset(store, image_dir, mask_dir)
    assert report.n_failed == 0, report.failures

    split = load_split(image_dir, image_dir)
    summary, _ = evaluate(store, split, cross_camera=True)
    elapsed = time.monotonic() - start

    assert summary.n_queries == 80
    assert summary.rank_1 == 100.0
    assert elapsed < 30.0


def _jittered_rank_1(stretch: bool) -> float:
    jitter = jittered_illumination(0.8, 1.2)
    config = ExtractionConfig(stretch_l=stretch)
    records = []
    for spec in default_identities():
        for view in range(4):
            person = render_view(spec, view, illumination=jitter(spec.person_id, view))
            pid, cam = parse_market_name(person.image_id)
            records.append(
                extract_features(
                    person, config, extractor_version="a4", person_id=pid, camera_id=cam
                )
            )
    matrix = GalleryMatrix(records)
    hits = 0
    for record in records:
        result = rank_query(record, matrix, cross_camera=True)
        prefix = f"{record.person_id:04d}_"
        hits += rank_r(result, 1, lambda image_id: image_id.startswith(prefix))
    return 100.0 * hits / len(records)


def test_a4_illumination_robustness():
    """Per-view global L factors in 0.8-1.2: rank-1 stays >= 90% with the
    lightness stretch on, and strictly beats the same pipeline with it off."""
    stretched = _jittered_rank_1(stretch=True)
    unstretched = _jittered_rank_1(stretch=False)
    assert stretched >= 90.0, (stretched, unstretched)
    assert stretched > unstretched, (stretched, unstretched)


def test_a5_lbp_rotation_invariance():
    """50 random rasters+masks: 90/180/270 degree rotations leave both LBP
    histograms bit-identical."""
    np_rng = np.random.default_rng(505)
    for _ in range(50):
        h = int(np_rng.integers(8, 24))
        w = int(np_rng.integers(8, 24))
        gray = np_rng.integers(0, 256, size=(h, w), dtype=np.uint8)
        region = np_rng.random((h, w)) < 0.4
        region[h // 2, w // 2] = True
        base = lbp_histograms(gray, region)
        for k in (1, 2, 3):
            rotated = lbp_histograms(
                np.rot90(gray, k).copy(), np.rot90(region, k).copy()
            )
            for before, after in zip(base, rotated):
                assert after.n_codes == before.n_codes
                np.testing.assert_array_equal(after.bins, before.bins)


def test_a6_range_and_symmetry():
    """Over 10k random record pairs: every similarity in [0,1], S_sim never
    above the default class-weight total, pair_score symmetric field for
    field."""
    pool = bench_records(400, seed=606, id_prefix="a6_")
    np_rng = np.random.default_rng(607)
    pairs = np_rng.integers(0, len(pool), size=(10_000, 2))
    cap = ClassWeights().total()
    for i, j in pairs:
        rep = pair_score(pool[i], pool[j])
        assert 0.0 <= rep.s_simn <= 1.0
        assert 0.0 <= rep.s_sim <= cap
        for breakdown in rep.per_class.values():
            assert 0.0 <= breakdown.s_c <= 1.0
            for value in breakdown.channels.as_dict().values():
                assert value is None or 0.0 <= value <= 1.0

        flipped = pair_score(pool[j], pool[i])
        assert flipped.s_sim == rep.s_sim
        assert flipped.s_simn == rep.s_simn
        assert flipped.no_shared_classes == rep.no_shared_classes
        assert flipped.shared_classes == rep.shared_classes
        for class_id, breakdown in rep.per_class.items():
            other = flipped.per_class[class_id]
            assert other.s_c == breakdown.s_c
            assert other.channels.as_dict() == breakdown.channels.as_dict()


GALLERY_SIZE = 19_732
_CPUS = os.cpu_count() or 1


def test_a7_single_query_latency():
    """One query against a 19,732-record gallery ranks in under a second
    on a single worker."""
    gallery = GalleryMatrix(bench_records(GALLERY_SIZE, seed=707, id_prefix="g"))
    query = bench_records(1, seed=708, id_prefix="q")[0]
    score_against_gallery(query, gallery)  # warm numpy dispatch paths

    start = time.monotonic()
    scores, _ = score_against_gallery(query, gallery)
    order = order_by_score(gallery.ids, scores)
    elapsed = time.monotonic() - start

    assert len(scores) == GALLERY_SIZE
    assert order.shape == (GALLERY_SIZE,)
    assert elapsed < 1.0, f"took {elapsed:.3f}s"


@pytest.mark.skipif(
    _CPUS < 4,
    reason=f"worker-scaling clause presumes a commodity 4-core CPU; "
    f"this host exposes {_CPUS} logical CPU(s)",
)
def test_a7_worker_scaling():
    """Batch scoring speeds up at least 3x with 4 workers on a 4-core CPU."""
    gallery = GalleryMatrix(bench_records(GALLERY_SIZE, seed=707, id_prefix="g"))
    queries = bench_records(64, seed=709, id_prefix="q")
    score_batch(queries[:2], gallery, workers=1)  # warm

    start = time.monotonic()
    serial = score_batch(queries, gallery, workers=1)
    t_serial = time.monotonic() - start

    start = time.monotonic()
    forked = score_batch(queries, gallery, workers=4)
    t_forked = time.monotonic() - start

    for s, f in zip(serial, forked):
        np.testing.assert_array_equal(s, f)
    assert t_serial / t_forked >= 3.0, f"serial {t_serial:.2f}s, 4 workers {t_forked:.2f}s"


def test_a8_attribute_search(gallery_records):
    """An upper-clothes color query returns that identity's images as the
    top block, for identity 7's red and four other wardrobe colors."""
    specs = {s.person_id: s for s in default_identities()}
    matrix = GalleryMatrix(gallery_records)

    for pid in (7, 1, 5, 12, 16):
        rgb = shirt_rgb(specs[pid])
        query = AttributeQuery(
            entries=(AttributeEntry(MergedClass.UPPER_CLOTHES, rgb),)
        )
        result = search_by_attributes(query, matrix, k=4)
        top = [image_id for image_id, _ in result.ranked]
        assert len(top) == 4
        assert all(image_id.startswith(f"{pid:04d}_") for image_id in top), (pid, top)

    # the hex the red shirt was designed around works verbatim
    literal = AttributeQuery(
        entries=(AttributeEntry(MergedClass.UPPER_CLOTHES, (210, 43, 43)),)
    )
    top = [i for i, _ in search_by_attributes(literal, matrix, k=4).ranked]
    assert all(image_id.startswith("0007_") for image_id in top)
