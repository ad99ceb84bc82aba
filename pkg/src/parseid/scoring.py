"""Pair scoring: six feature channels fold into class similarities, class
similarities fold into the pair scores S_sim and S_simn.

Channel weights sum to one so every class similarity stays in [0, 1];
class weights express how discriminative a garment is (upper clothes
dominate, limbs count least). When a channel is empty on both sides its
weight is redistributed proportionally over the channels that are present.
Over-highlighted classes take no part at all.

Two implementations exist side by side: a scalar path that produces the
full interpretable per-channel breakdown for one pair, and a packed-matrix
path that scores one query against an entire gallery with numpy and is
what ranking uses. They compute the same numbers.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
import multiprocessing

import numpy as np

from .classes import ALL_CLASSES, MergedClass
from .color import BinarizedHistogram, LabMean, bits_to_u64, decode_lab
from .errors import ConfigError
from .features import ClassFeatures, FeatureRecord
from .texture import lbp_bins_to_dense36, texture_similarity

# Lab distance beyond which two mean colors count as entirely dissimilar.
K_D = 35.0

# pid value standing in for "unknown" in packed metadata arrays.
MISSING_PID = np.iinfo(np.int64).min

WEIGHT_TOLERANCE = 1e-9


@dataclass(frozen=True)
class FeatureWeights:
    """Per-channel weights; must sum to exactly one."""

    l: float = 0.13
    a: float = 0.13
    b: float = 0.13
    d: float = 0.31
    t_in: float = 0.15
    t_co: float = 0.15

    def validate(self) -> None:
        total = self.l + self.a + self.b + self.d + self.t_in + self.t_co
        if abs(total - 1.0) > WEIGHT_TOLERANCE:
            raise ConfigError(f"feature weights must sum to 1, got {total!r}")
        if any(w < 0 for w in (self.l, self.a, self.b, self.d, self.t_in, self.t_co)):
            raise ConfigError("feature weights must be non-negative")

    def as_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def default_class_weights() -> dict[MergedClass, float]:
    weights = {c: 1.0 for c in ALL_CLASSES}
    for c in (
        MergedClass.HAT,
        MergedClass.GLOVE,
        MergedClass.SUNGLASSES,
        MergedClass.LEFT_SHOE,
        MergedClass.RIGHT_SHOE,
    ):
        weights[c] = 2.0
    weights[MergedClass.SCARF] = 3.0
    weights[MergedClass.PANTS] = 6.0
    weights[MergedClass.UPPER_CLOTHES] = 8.0
    return weights


@dataclass(frozen=True)
class ClassWeights:
    """Per-class weights; defaults total 34 over the 15 classes."""

    weights: dict[MergedClass, float] = field(default_factory=default_class_weights)

    def __getitem__(self, class_id: MergedClass) -> float:
        return self.weights[class_id]

    def total(self) -> float:
        return sum(self.weights.values())

    def validate(self) -> None:
        missing = [c.key for c in ALL_CLASSES if c not in self.weights]
        if missing:
            raise ConfigError(f"class weights missing entries: {missing}")
        if any(w <= 0 for w in self.weights.values()):
            raise ConfigError("class weights must be positive")


def binary_hist_similarity(
    b1: BinarizedHistogram, b2: BinarizedHistogram
) -> float | None:
    """Fraction of jointly marked bins among all marked bins, in [0, 1].

    Summing the two bit patterns yields bins valued 0, 1 or 2; the score is
    the share of 2s among non-zero bins. None (channel absent) when both
    patterns are empty.
    """
    both = int(np.count_nonzero(b1.bits & b2.bits))
    either = int(np.count_nonzero(b1.bits | b2.bits))
    if either == 0:
        return None
    return both / either


def distance_similarity(m1: LabMean, m2: LabMean, k_d: float = K_D) -> float:
    """Similarity of two mean colors from their native-Lab distance.

    The encoded means are unpacked to native CIELAB units first, where
    Euclidean distance is a perceptual metric; similarity falls linearly
    from 1 at distance 0 to 0 at k_d and beyond.
    """
    p1 = decode_lab(m1.as_array())
    p2 = decode_lab(m2.as_array())
    d = math.sqrt(((p1 - p2) ** 2).sum())
    return max(0.0, 1.0 - d / k_d)


@dataclass
class ChannelScores:
    """Per-channel similarities of one shared class (None = absent)."""

    s_l: float | None
    s_a: float | None
    s_b: float | None
    s_d: float | None
    s_in: float | None
    s_co: float | None

    def as_dict(self) -> dict[str, float | None]:
        return {
            "L": self.s_l,
            "a": self.s_a,
            "b": self.s_b,
            "d": self.s_d,
            "t_in": self.s_in,
            "t_co": self.s_co,
        }


def channel_scores(f1: ClassFeatures, f2: ClassFeatures, k_d: float = K_D) -> ChannelScores:
    return ChannelScores(
        s_l=binary_hist_similarity(f1.hist_l, f2.hist_l),
        s_a=binary_hist_similarity(f1.hist_a, f2.hist_a),
        s_b=binary_hist_similarity(f1.hist_b, f2.hist_b),
        s_d=distance_similarity(f1.mean, f2.mean, k_d),
        s_in=texture_similarity(f1.lbp_inner, f2.lbp_inner),
        s_co=texture_similarity(f1.lbp_contour, f2.lbp_contour),
    )


def combine_channels(scores: ChannelScores, w: FeatureWeights) -> float | None:
    """Weighted channel sum with proportional redistribution of absent weight.

    Dividing by the weight mass of present channels keeps the effective
    weights summing to one within the pair, so the result stays in [0, 1].
    """
    pairs = (
        (scores.s_l, w.l),
        (scores.s_a, w.a),
        (scores.s_b, w.b),
        (scores.s_d, w.d),
        (scores.s_in, w.t_in),
        (scores.s_co, w.t_co),
    )
    num = 0.0
    den = 0.0
    for s, wf in pairs:
        if s is not None:
            num += wf * s
            den += wf
    if den == 0.0:
        return None
    return num / den


def class_similarity(
    f1: ClassFeatures,
    f2: ClassFeatures,
    w: FeatureWeights | None = None,
    k_d: float = K_D,
) -> float | None:
    """Similarity of one class across two images, or None when excluded.

    A class is excluded (None) when either side is over-highlighted.
    """
    if f1.over_highlighted or f2.over_highlighted:
        return None
    return combine_channels(channel_scores(f1, f2, k_d), w or FeatureWeights())


@dataclass
class ClassBreakdown:
    channels: ChannelScores
    s_c: float


@dataclass
class SimilarityReport:
    """Full interpretable result of scoring one image pair."""

    id_1: str
    id_2: str
    per_class: dict[MergedClass, ClassBreakdown]
    shared_classes: set[MergedClass]
    s_sim: float
    s_simn: float
    no_shared_classes: bool


def pair_score(
    r1: FeatureRecord,
    r2: FeatureRecord,
    feature_weights: FeatureWeights | None = None,
    class_weights: ClassWeights | None = None,
    k_d: float = K_D,
) -> SimilarityReport:
    """Score a record pair over the classes present in both images.

    S_sim is the class-weighted sum of class similarities and is what
    ranking sorts by; S_simn normalizes it by the shared weight mass into
    [0, 1]. Over-highlighted classes are not shared. A pair without shared
    classes scores zero and is flagged.
    """
    fw = feature_weights or FeatureWeights()
    cw = class_weights or ClassWeights()
    per_class: dict[MergedClass, ClassBreakdown] = {}
    s_sim = 0.0
    weight_mass = 0.0
    for class_id in sorted(set(r1.classes) & set(r2.classes)):
        f1 = r1.classes[class_id]
        f2 = r2.classes[class_id]
        if f1.over_highlighted or f2.over_highlighted:
            continue
        scores = channel_scores(f1, f2, k_d)
        s_c = combine_channels(scores, fw)
        if s_c is None:
            continue
        per_class[class_id] = ClassBreakdown(channels=scores, s_c=s_c)
        s_sim += cw[class_id] * s_c
        weight_mass += cw[class_id]
    shared = set(per_class)
    return SimilarityReport(
        id_1=r1.image_id,
        id_2=r2.image_id,
        per_class=per_class,
        shared_classes=shared,
        s_sim=s_sim,
        s_simn=s_sim / weight_mass if weight_mass > 0 else 0.0,
        no_shared_classes=not shared,
    )


# ---------------------------------------------------------------------------
# Packed gallery scoring


@dataclass
class _ClassColumns:
    rows: np.ndarray  # int64[k], gallery row of each record having the class
    bits_l: np.ndarray  # uint64[k]
    bits_a: np.ndarray
    bits_b: np.ndarray
    means: np.ndarray  # float64[k, 3], native Lab units
    lbp_in: np.ndarray  # float64[k, 36]
    lbp_co: np.ndarray
    in_present: np.ndarray  # bool[k]
    co_present: np.ndarray


class GalleryMatrix:
    """Gallery records packed into flat arrays for one-pass query scoring.

    Bit patterns become uint64 masks (popcounts give the binarized-histogram
    similarity), LBP histograms collapse onto the 36 canonical-code slots,
    and means are pre-decoded to native Lab. Rows are ordered by image_id so
    the layout is independent of insertion order.
    """

    def __init__(self, records: list[FeatureRecord]):
        ordered = sorted(records, key=lambda r: r.image_id)
        self.ids = np.array([r.image_id for r in ordered])
        self.n = len(ordered)
        self.person_ids = np.array(
            [MISSING_PID if r.person_id is None else r.person_id for r in ordered],
            dtype=np.int64,
        )
        self.camera_ids = np.array(
            [MISSING_PID if r.camera_id is None else r.camera_id for r in ordered],
            dtype=np.int64,
        )
        self.columns: dict[MergedClass, _ClassColumns] = {}
        for class_id in ALL_CLASSES:
            rows = [
                (i, r.classes[class_id])
                for i, r in enumerate(ordered)
                if class_id in r.classes and not r.classes[class_id].over_highlighted
            ]
            if not rows:
                continue
            feats = [f for _, f in rows]
            self.columns[class_id] = _ClassColumns(
                rows=np.array([i for i, _ in rows], dtype=np.int64),
                bits_l=np.array([bits_to_u64(f.hist_l.bits) for f in feats]),
                bits_a=np.array([bits_to_u64(f.hist_a.bits) for f in feats]),
                bits_b=np.array([bits_to_u64(f.hist_b.bits) for f in feats]),
                means=decode_lab(np.stack([f.mean.as_array() for f in feats])),
                lbp_in=np.stack([lbp_bins_to_dense36(f.lbp_inner.bins) for f in feats]),
                lbp_co=np.stack(
                    [lbp_bins_to_dense36(f.lbp_contour.bins) for f in feats]
                ),
                in_present=np.array([f.lbp_inner.n_codes > 0 for f in feats]),
                co_present=np.array([f.lbp_contour.n_codes > 0 for f in feats]),
            )

    def row_of(self, image_id: str) -> int:
        idx = np.searchsorted(self.ids, image_id)
        if idx >= self.n or self.ids[idx] != image_id:
            raise KeyError(image_id)
        return int(idx)


def score_against_gallery(
    record: FeatureRecord,
    gallery: GalleryMatrix,
    feature_weights: FeatureWeights | None = None,
    class_weights: ClassWeights | None = None,
    k_d: float = K_D,
) -> tuple[np.ndarray, np.ndarray]:
    """S_sim of one query against every gallery row, plus shared weight mass.

    Returns (scores, weight_mass), each aligned with gallery.ids; S_simn of
    row i is scores[i] / weight_mass[i] where the mass is non-zero.
    """
    fw = feature_weights or FeatureWeights()
    cw = class_weights or ClassWeights()
    scores = np.zeros(gallery.n, dtype=np.float64)
    mass = np.zeros(gallery.n, dtype=np.float64)
    for class_id in sorted(record.classes):
        feats = record.classes[class_id]
        if feats.over_highlighted:
            continue
        cols = gallery.columns.get(class_id)
        if cols is None:
            continue

        num = np.zeros(len(cols.rows), dtype=np.float64)
        den = np.zeros(len(cols.rows), dtype=np.float64)
        for bits, gallery_bits, w in (
            (feats.hist_l.bits, cols.bits_l, fw.l),
            (feats.hist_a.bits, cols.bits_a, fw.a),
            (feats.hist_b.bits, cols.bits_b, fw.b),
        ):
            q = bits_to_u64(bits)
            union = np.bitwise_count(gallery_bits | q).astype(np.float64)
            inter = np.bitwise_count(gallery_bits & q).astype(np.float64)
            present = union > 0
            s = np.divide(inter, union, out=np.zeros_like(union), where=present)
            num += w * s
            den += w * present

        diff = cols.means - decode_lab(feats.mean.as_array())
        d = np.sqrt((diff**2).sum(axis=1))
        num += fw.d * np.maximum(0.0, 1.0 - d / k_d)
        den += fw.d

        for hist, gallery_lbp, gallery_present, w in (
            (feats.lbp_inner, cols.lbp_in, cols.in_present, fw.t_in),
            (feats.lbp_contour, cols.lbp_co, cols.co_present, fw.t_co),
        ):
            if hist.n_codes == 0:
                continue
            # same ulp cap as the scalar texture_similarity
            s = np.minimum(
                np.minimum(gallery_lbp, lbp_bins_to_dense36(hist.bins)).sum(axis=1), 1.0
            )
            num += w * s * gallery_present
            den += w * gallery_present

        # The distance channel always exists, so den == 0 only under a
        # custom zero d-weight with every other channel absent.
        counted = den > 0
        s_c = np.divide(num, den, out=np.zeros_like(num), where=counted)
        scores[cols.rows] += cw[class_id] * s_c * counted
        mass[cols.rows] += cw[class_id] * counted
    return scores, mass


def order_by_score(ids: np.ndarray, scores: np.ndarray) -> np.ndarray:
    """Row order by descending score, ties broken by ascending image_id."""
    return np.lexsort((ids, -scores))


# Worker-side state for batch scoring; populated by the pool initializer and
# inherited through fork, so the gallery is never pickled per task.
_BATCH_STATE: dict = {}


def _init_batch_worker(gallery, fw, cw, k_d) -> None:
    _BATCH_STATE["args"] = (gallery, fw, cw, k_d)


def _score_chunk(records: list[FeatureRecord]) -> list[np.ndarray]:
    gallery, fw, cw, k_d = _BATCH_STATE["args"]
    return [score_against_gallery(r, gallery, fw, cw, k_d)[0] for r in records]


def score_batch(
    records: list[FeatureRecord],
    gallery: GalleryMatrix,
    feature_weights: FeatureWeights | None = None,
    class_weights: ClassWeights | None = None,
    k_d: float = K_D,
    workers: int = 1,
) -> list[np.ndarray]:
    """Score many queries against one gallery, optionally in parallel.

    Results are ordered like the input regardless of worker count; scoring a
    query is a pure function of (record, gallery, weights), so the worker
    split cannot change any value.
    """
    fw = feature_weights or FeatureWeights()
    cw = class_weights or ClassWeights()
    if workers <= 1 or len(records) <= 1:
        return [score_against_gallery(r, gallery, fw, cw, k_d)[0] for r in records]

    ctx = multiprocessing.get_context("fork")
    chunk = max(1, -(-len(records) // (workers * 4)))
    chunks = [records[i : i + chunk] for i in range(0, len(records), chunk)]
    with ProcessPoolExecutor(
        max_workers=workers,
        mp_context=ctx,
        initializer=_init_batch_worker,
        initargs=(gallery, fw, cw, k_d),
    ) as pool:
        parts = list(pool.map(_score_chunk, chunks))
    return [scores for part in parts for scores in part]
