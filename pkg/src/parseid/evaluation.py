"""Ranked-retrieval evaluation: query/gallery splits, per-query rankings
under the cross-camera protocol, and the rank-r / mAP metrics.

A split is defined by two directories of images whose file stems are the
image ids; features come from a store built beforehand. Metrics follow the
Market1501 convention: per query, gallery records with the same person AND
camera are excluded, junk annotations (person_id -1) are excluded, and
distractors (person_id 0) stay as permanent negatives.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import IngestError
from .features import FeatureRecord
from .masks import parse_market_name
from .scoring import (
    MISSING_PID,
    ClassWeights,
    FeatureWeights,
    GalleryMatrix,
    order_by_score,
    score_batch,
    score_against_gallery,
)
from .store import FeatureStore, list_dataset_images

DEFAULT_RANKS = (1, 5, 10)


@dataclass(frozen=True)
class SplitImage:
    image_id: str
    person_id: int | None
    camera_id: int | None


@dataclass
class Split:
    queries: list[SplitImage]
    gallery: list[SplitImage]
    n_query_files: int  # before the exclusion list applied
    n_excluded_by_list: int


def _read_exclusion_list(path: str | Path) -> set[str]:
    ids = set()
    for line in Path(path).read_text().splitlines():
        name = line.split("#", 1)[0].strip()
        if not name:
            continue
        p = Path(name)
        ids.add(p.stem if p.suffix.lower() in (".jpg", ".jpeg", ".png", ".bmp") else name)
    return ids


def _scan_dir(directory: str | Path, strict: bool) -> list[SplitImage]:
    out = []
    for path in list_dataset_images(directory):
        ids = parse_market_name(path.stem)
        if ids is None and strict:
            raise IngestError(f"cannot parse person/camera ids from {path.name}")
        out.append(
            SplitImage(
                image_id=path.stem,
                person_id=ids[0] if ids else None,
                camera_id=ids[1] if ids else None,
            )
        )
    return out


def load_split(
    test_dir: str | Path,
    query_dir: str | Path,
    clear_query_list: str | Path | None = None,
    strict: bool = False,
) -> Split:
    """Scan gallery and query directories into a Split.

    Ids listed in clear_query_list are removed from the query set (the list
    names queries with known parsing defects; what remains are the clear
    queries). Gallery content is never filtered here: junk and distractor
    ids stay in, the protocol decides their role per query. Unparsable
    filenames raise under strict, otherwise load with unknown person/camera.
    """
    gallery = _scan_dir(test_dir, strict)
    queries = _scan_dir(query_dir, strict)
    n_query_files = len(queries)
    if clear_query_list is not None:
        drop = _read_exclusion_list(clear_query_list)
        queries = [q for q in queries if q.image_id not in drop]
    return Split(
        queries=queries,
        gallery=gallery,
        n_query_files=n_query_files,
        n_excluded_by_list=n_query_files - len(queries),
    )


# ---------------------------------------------------------------------------
# Ranking


@dataclass
class RankingResult:
    """One query's ranked gallery with protocol exclusions made explicit.

    ranked holds (gallery image_id, S_sim) in descending score order, ties
    broken by ascending image_id; excluded lists the gallery ids the
    protocol removed before ranking.
    """

    query_id: str
    ranked: list[tuple[str, float]]
    excluded: set[str] = field(default_factory=set)


def _protocol_keep(
    gallery: GalleryMatrix, person_id: int | None, camera_id: int | None
) -> np.ndarray:
    """Rows that stay in the ranking for a query under the standard protocol."""
    keep = gallery.person_ids != -1  # junk annotations never ranked
    if person_id is not None and camera_id is not None:
        keep &= ~((gallery.person_ids == person_id) & (gallery.camera_ids == camera_id))
    return keep


def _truth_flags(gallery: GalleryMatrix, person_id: int | None) -> np.ndarray:
    """True-match mask: same positive person id. Junk/distractors never match."""
    if person_id is None or person_id <= 0:
        return np.zeros(gallery.n, dtype=bool)
    return gallery.person_ids == person_id


def rank_query(
    query: FeatureRecord,
    gallery: GalleryMatrix | list[FeatureRecord],
    cross_camera: bool = True,
    feature_weights: FeatureWeights | None = None,
    class_weights: ClassWeights | None = None,
) -> RankingResult:
    """Rank every gallery record against one query by S_sim.

    With cross_camera on, the Market1501 protocol applies (junk ids and
    same-person-same-camera records drop out); off means the raw ranking of
    the full gallery, self-matches included.
    """
    if not isinstance(gallery, GalleryMatrix):
        gallery = GalleryMatrix(gallery)
    scores, _ = score_against_gallery(query, gallery, feature_weights, class_weights)
    if cross_camera:
        keep = _protocol_keep(gallery, query.person_id, query.camera_id)
    else:
        keep = np.ones(gallery.n, dtype=bool)
    kept_rows = np.flatnonzero(keep)
    order = kept_rows[order_by_score(gallery.ids[kept_rows], scores[kept_rows])]
    return RankingResult(
        query_id=query.image_id,
        ranked=[(str(gallery.ids[i]), float(scores[i])) for i in order],
        excluded={str(gallery.ids[i]) for i in np.flatnonzero(~keep)},
    )


# ---------------------------------------------------------------------------
# Metrics


def rank_r(result: RankingResult, r: int, truth) -> int:
    """1 if a true match sits within the first r positions, else 0."""
    if r < 1:
        raise ValueError("r must be >= 1")
    return int(any(truth(image_id) for image_id, _ in result.ranked[:r]))


def _ap_from_flags(flags: np.ndarray) -> float | None:
    """Average precision of one ranked truth mask; None without true matches.

    Precision is accumulated only at positions holding true matches:
    AP = (1/n_TP) * sum_j hits_up_to(j) / j over true-match positions j.
    """
    hits = np.flatnonzero(flags)
    if hits.size == 0:
        return None
    precisions = np.arange(1, hits.size + 1, dtype=np.float64) / (hits + 1)
    return float(precisions.mean())


def average_precision(result: RankingResult, truth) -> float | None:
    flags = np.array([truth(image_id) for image_id, _ in result.ranked], dtype=bool)
    return _ap_from_flags(flags)


def mean_average_precision(results: list[RankingResult], truth) -> float:
    """Mean AP over queries that have at least one true match."""
    values = [ap for r in results if (ap := average_precision(r, truth)) is not None]
    if not values:
        return 0.0
    return float(np.mean(values))


# ---------------------------------------------------------------------------
# End-to-end evaluation


@dataclass
class QueryRow:
    query_id: str
    best_match_rank: int | None  # 1-based position of first true match
    ap: float | None


@dataclass
class EvalSummary:
    rank_scores: dict[int, float]  # r -> percentage over counted queries
    mean_ap: float  # percentage
    n_queries: int  # queries entering the denominators
    n_gallery: int
    n_dropped_no_match: int
    n_missing_queries: int  # split members without a stored record
    n_missing_gallery: int
    n_excluded_by_list: int
    cross_camera: bool
    elapsed_s: float

    @property
    def rank_1(self) -> float:
        return self.rank_scores[1]

    @property
    def rank_5(self) -> float:
        return self.rank_scores[5]

    @property
    def rank_10(self) -> float:
        return self.rank_scores[10]

    def to_dict(self) -> dict:
        out = {f"rank_{r}": v for r, v in sorted(self.rank_scores.items())}
        out.update(
            mAP=self.mean_ap,
            n_queries=self.n_queries,
            n_gallery=self.n_gallery,
            n_dropped_no_match=self.n_dropped_no_match,
            n_missing_queries=self.n_missing_queries,
            n_missing_gallery=self.n_missing_gallery,
            n_excluded_by_list=self.n_excluded_by_list,
            cross_camera=self.cross_camera,
            elapsed_s=self.elapsed_s,
        )
        return out


def evaluate(
    store: FeatureStore,
    split: Split,
    cross_camera: bool = True,
    ranks: tuple[int, ...] = DEFAULT_RANKS,
    feature_weights: FeatureWeights | None = None,
    class_weights: ClassWeights | None = None,
    workers: int = 1,
) -> tuple[EvalSummary, list[QueryRow]]:
    """Score every query against the gallery and aggregate the metrics.

    Queries with no stored record, or with no true match left after
    protocol exclusions, are dropped from the metric denominators and
    counted in the summary. The per-query rows list everything that was
    scored, dropped queries included (with empty rank/AP), for audit.
    """
    start = time.monotonic()
    ranks = tuple(sorted(set(ranks) | set(DEFAULT_RANKS)))

    gallery_records = []
    n_missing_gallery = 0
    for member in split.gallery:
        if member.image_id in store:
            gallery_records.append(store.get(member.image_id))
        else:
            n_missing_gallery += 1
    matrix = GalleryMatrix(gallery_records)

    query_records = []
    n_missing_queries = 0
    for member in split.queries:
        if member.image_id in store:
            query_records.append((member, store.get(member.image_id)))
        else:
            n_missing_queries += 1

    all_scores = score_batch(
        [record for _, record in query_records],
        matrix,
        feature_weights,
        class_weights,
        workers=workers,
    )

    rows: list[QueryRow] = []
    hits_at: dict[int, int] = {r: 0 for r in ranks}
    ap_values: list[float] = []
    n_dropped = 0
    for (member, _), scores in zip(query_records, all_scores):
        if cross_camera:
            keep = _protocol_keep(matrix, member.person_id, member.camera_id)
        else:
            keep = np.ones(matrix.n, dtype=bool)
        truth = _truth_flags(matrix, member.person_id) & keep
        kept_rows = np.flatnonzero(keep)
        order = kept_rows[order_by_score(matrix.ids[kept_rows], scores[kept_rows])]
        flags = truth[order]
        ap = _ap_from_flags(flags)
        if ap is None:
            n_dropped += 1
            rows.append(QueryRow(member.image_id, None, None))
            continue
        first = int(np.flatnonzero(flags)[0]) + 1
        for r in ranks:
            hits_at[r] += first <= r
        ap_values.append(ap)
        rows.append(QueryRow(member.image_id, first, ap))

    n_counted = len(ap_values)
    summary = EvalSummary(
        rank_scores={
            r: (100.0 * hits_at[r] / n_counted if n_counted else 0.0) for r in ranks
        },
        mean_ap=100.0 * float(np.mean(ap_values)) if ap_values else 0.0,
        n_queries=n_counted,
        n_gallery=matrix.n,
        n_dropped_no_match=n_dropped,
        n_missing_queries=n_missing_queries,
        n_missing_gallery=n_missing_gallery,
        n_excluded_by_list=split.n_excluded_by_list,
        cross_camera=cross_camera,
        elapsed_s=time.monotonic() - start,
    )
    return summary, rows


def write_query_csv(path: str | Path, rows: list[QueryRow]) -> None:
    """Audit CSV: query_id, best_match_rank, AP (blank when dropped)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["query_id", "best_match_rank", "AP"])
        for row in rows:
            writer.writerow(
                [
                    row.query_id,
                    "" if row.best_match_rank is None else row.best_match_rank,
                    "" if row.ap is None else f"{row.ap:.6f}",
                ]
            )
