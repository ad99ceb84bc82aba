"""Disk-backed feature store: one JSON file per image plus a metadata index.

Layout:

    <store>/index.json            format/extractor versions, image metadata
    <store>/records/<id>.json     full per-class features of one image

Records serialize binarized histograms as 16-digit hex masks (bin 0 is the
most significant bit), texture histograms as sparse {code: value} maps, and
means as three reals. Floats round-trip exactly through repr, so a loaded
record is bit-identical to the extracted one.
"""

from __future__ import annotations

import json
import os
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
import multiprocessing
from pathlib import Path
from typing import Callable, Iterator

import numpy as np

from .classes import CLASS_BY_KEY, MergedClass
from .color import BinarizedHistogram, LabMean, bits_to_hex, hex_to_bits
from .errors import StoreError, VersionConflictError
from .features import ClassFeatures, ExtractionConfig, FeatureRecord, extract_features
from .masks import load_person_image, mask_path_for, parse_market_name
from .texture import LbpHistogram, N_CODES

FORMAT_VERSION = 1

# Image ids become file names; forbid separators and leading dots. A leading
# "-" is legal (junk annotations are named "-1_c...").
_SAFE_ID = re.compile(r"^[A-Za-z0-9_-][A-Za-z0-9._-]*$")

_IMAGE_SUFFIXES = (".jpg", ".jpeg", ".png", ".bmp")


def _binarized_to_dict(h: BinarizedHistogram) -> dict:
    return {"bits": bits_to_hex(h.bits), "threshold": h.threshold_used}


def _binarized_from_dict(channel: str, d: dict) -> BinarizedHistogram:
    return BinarizedHistogram(
        channel=channel, bits=hex_to_bits(d["bits"]), threshold_used=float(d["threshold"])
    )


def _lbp_to_dict(h: LbpHistogram) -> dict:
    nz = np.nonzero(h.bins)[0]
    return {"n_codes": h.n_codes, "bins": {str(int(i)): float(h.bins[i]) for i in nz}}


def _lbp_from_dict(region: str, d: dict) -> LbpHistogram:
    bins = np.zeros(N_CODES, dtype=np.float64)
    for code, value in d["bins"].items():
        bins[int(code)] = float(value)
    return LbpHistogram(region=region, bins=bins, n_codes=int(d["n_codes"]))


def _class_to_dict(f: ClassFeatures) -> dict:
    return {
        "n_pixels": f.n_pixels,
        "over_highlighted": f.over_highlighted,
        "mean": [f.mean.l, f.mean.a, f.mean.b],
        "hist_l": _binarized_to_dict(f.hist_l),
        "hist_a": _binarized_to_dict(f.hist_a),
        "hist_b": _binarized_to_dict(f.hist_b),
        "lbp_inner": _lbp_to_dict(f.lbp_inner),
        "lbp_contour": _lbp_to_dict(f.lbp_contour),
    }


def _class_from_dict(d: dict) -> ClassFeatures:
    mean = d["mean"]
    return ClassFeatures(
        hist_l=_binarized_from_dict("L", d["hist_l"]),
        hist_a=_binarized_from_dict("a", d["hist_a"]),
        hist_b=_binarized_from_dict("b", d["hist_b"]),
        mean=LabMean(l=float(mean[0]), a=float(mean[1]), b=float(mean[2])),
        over_highlighted=bool(d["over_highlighted"]),
        lbp_contour=_lbp_from_dict("contour", d["lbp_contour"]),
        lbp_inner=_lbp_from_dict("inner", d["lbp_inner"]),
        n_pixels=int(d["n_pixels"]),
    )


def record_to_dict(record: FeatureRecord) -> dict:
    """JSON-ready form of a record; the service returns this verbatim."""
    return {
        "image_id": record.image_id,
        "extractor_version": record.extractor_version,
        "person_id": record.person_id,
        "camera_id": record.camera_id,
        "source_paths": record.source_paths,
        "classes": {c.key: _class_to_dict(f) for c, f in sorted(record.classes.items())},
    }


def record_from_dict(d: dict) -> FeatureRecord:
    return FeatureRecord(
        image_id=d["image_id"],
        classes={CLASS_BY_KEY[k]: _class_from_dict(v) for k, v in d["classes"].items()},
        extractor_version=d["extractor_version"],
        person_id=d["person_id"],
        camera_id=d["camera_id"],
        source_paths=dict(d.get("source_paths") or {}),
    )


def _write_json(path: Path, payload: dict) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(payload, sort_keys=True, indent=1))
    os.replace(tmp, path)


class FeatureStore:
    """A directory of feature records addressed by image id.

    Reads are safe from any number of processes; writes expect a single
    writer (the service serializes uploads through one lock).
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        index_path = self.path / "index.json"
        if not index_path.is_file():
            raise StoreError(f"no feature store at {self.path} (missing index.json)")
        index = json.loads(index_path.read_text())
        if index.get("format_version") != FORMAT_VERSION:
            raise StoreError(
                f"store {self.path} has format_version {index.get('format_version')}, "
                f"this build reads {FORMAT_VERSION}"
            )
        self.extractor_version: str = index["extractor_version"]
        self._meta: dict[str, dict] = index["images"]

    @classmethod
    def create(cls, path: str | Path, extractor_version: str) -> "FeatureStore":
        path = Path(path)
        if (path / "index.json").exists():
            raise StoreError(f"store already exists at {path}")
        (path / "records").mkdir(parents=True, exist_ok=True)
        _write_json(
            path / "index.json",
            {
                "format_version": FORMAT_VERSION,
                "extractor_version": extractor_version,
                "images": {},
            },
        )
        return cls(path)

    @classmethod
    def open_or_create(cls, path: str | Path, extractor_version: str) -> "FeatureStore":
        if (Path(path) / "index.json").is_file():
            return cls(path)
        return cls.create(path, extractor_version)

    def _record_path(self, image_id: str) -> Path:
        return self.path / "records" / f"{image_id}.json"

    def _flush_index(self) -> None:
        _write_json(
            self.path / "index.json",
            {
                "format_version": FORMAT_VERSION,
                "extractor_version": self.extractor_version,
                "images": self._meta,
            },
        )

    def __len__(self) -> int:
        return len(self._meta)

    def __contains__(self, image_id: str) -> bool:
        return image_id in self._meta

    def image_ids(self) -> list[str]:
        return sorted(self._meta)

    def metadata(self, image_id: str) -> dict:
        return dict(self._meta[image_id])

    def put(self, record: FeatureRecord, overwrite: bool = False) -> None:
        self._put_file(record, overwrite)
        self._flush_index()

    def put_many(self, records: list[FeatureRecord], overwrite: bool = False) -> None:
        """Like repeated put() with one index flush at the end."""
        for record in records:
            self._put_file(record, overwrite)
        self._flush_index()

    def _put_file(self, record: FeatureRecord, overwrite: bool) -> None:
        if not _SAFE_ID.match(record.image_id):
            raise StoreError(f"image id {record.image_id!r} is not storable")
        if record.extractor_version != self.extractor_version:
            raise VersionConflictError(
                f"record {record.image_id} was extracted by version "
                f"{record.extractor_version}, store holds {self.extractor_version}"
            )
        if record.image_id in self._meta and not overwrite:
            raise StoreError(f"image {record.image_id} already stored")
        _write_json(self._record_path(record.image_id), record_to_dict(record))
        self._meta[record.image_id] = {
            "person_id": record.person_id,
            "camera_id": record.camera_id,
        }

    def get(self, image_id: str) -> FeatureRecord:
        if image_id not in self._meta:
            raise KeyError(image_id)
        return record_from_dict(json.loads(self._record_path(image_id).read_text()))

    def get_dict(self, image_id: str) -> dict:
        """The stored JSON form, exactly as record_to_dict produced it."""
        if image_id not in self._meta:
            raise KeyError(image_id)
        return json.loads(self._record_path(image_id).read_text())

    def records(self) -> Iterator[FeatureRecord]:
        for image_id in self.image_ids():
            yield self.get(image_id)

    def load_all(self) -> list[FeatureRecord]:
        return list(self.records())


# ---------------------------------------------------------------------------
# Bulk extraction from an image + mask directory pair


@dataclass
class BuildReport:
    n_built: int
    n_failed: int
    n_skipped: int  # already present in the store, left untouched
    failures: list[tuple[str, str]]  # (image path, reason)
    elapsed_s: float


_BUILD_STATE: dict = {}


def _init_build_worker(config: ExtractionConfig, version: str, mask_dir: str) -> None:
    _BUILD_STATE["args"] = (config, version, mask_dir)


def _extract_one(image_path: str) -> tuple[str, FeatureRecord | None, str | None]:
    config, version, mask_dir = _BUILD_STATE["args"]
    try:
        person = load_person_image(image_path, mask_path_for(image_path, mask_dir))
        ids = parse_market_name(person.image_id)
        record = extract_features(
            person,
            config=config,
            extractor_version=version,
            person_id=ids[0] if ids else None,
            camera_id=ids[1] if ids else None,
            source_paths={"image": str(image_path)},
        )
        return image_path, record, None
    except Exception as exc:
        return image_path, None, f"{type(exc).__name__}: {exc}"


def list_dataset_images(image_dir: str | Path) -> list[Path]:
    image_dir = Path(image_dir)
    paths = [p for p in image_dir.iterdir() if p.suffix.lower() in _IMAGE_SUFFIXES]
    return sorted(paths)


def build_from_dataset(
    store: FeatureStore,
    image_dir: str | Path,
    mask_dir: str | Path,
    config: ExtractionConfig | None = None,
    workers: int = 1,
    overwrite: bool = False,
    progress: Callable[[int, int], None] | None = None,
) -> BuildReport:
    """Extract and store features for every image in a directory.

    Masks pair by file stem inside mask_dir. Images that fail to decode or
    parse are skipped and reported, never stored half-done. Output is
    deterministic for a given input directory regardless of worker count.
    """
    config = config or ExtractionConfig()
    all_paths = list_dataset_images(image_dir)
    if overwrite:
        paths = [str(p) for p in all_paths]
    else:
        # rerunning over an existing store must leave stored files alone
        paths = [str(p) for p in all_paths if p.stem not in store]
    n_skipped = len(all_paths) - len(paths)
    start = time.monotonic()
    failures: list[tuple[str, str]] = []
    n_built = 0
    done = 0

    def consume(result: tuple[str, FeatureRecord | None, str | None]) -> None:
        nonlocal n_built, done
        image_path, record, error = result
        if record is not None:
            store._put_file(record, overwrite)
            n_built += 1
        else:
            failures.append((image_path, error or "unknown error"))
        done += 1
        if progress is not None:
            progress(done, len(paths))

    init_args = (config, store.extractor_version, str(mask_dir))
    if workers <= 1:
        _init_build_worker(*init_args)
        for path in paths:
            consume(_extract_one(path))
    else:
        ctx = multiprocessing.get_context("fork")
        with ProcessPoolExecutor(
            max_workers=workers,
            mp_context=ctx,
            initializer=_init_build_worker,
            initargs=init_args,
        ) as pool:
            for result in pool.map(_extract_one, paths, chunksize=8):
                consume(result)
    store._flush_index()
    return BuildReport(
        n_built=n_built,
        n_failed=len(failures),
        n_skipped=n_skipped,
        failures=failures,
        elapsed_s=time.monotonic() - start,
    )
