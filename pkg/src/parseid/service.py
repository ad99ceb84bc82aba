"""HTTP facade over the feature store, scoring, and attribute search.

The service holds an in-memory snapshot (records, gallery matrix, id map)
rebuilt after every ingest; searches rank against the snapshot, so they
see a consistent gallery even while an upload is in flight. All response
bodies for search come out of `json_bytes`, which the tests also call
directly: the service must never differ from a library call by a byte.
"""

from __future__ import annotations

import json
import shutil
import tempfile
import threading
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, File, HTTPException, Request, UploadFile
from fastapi.responses import FileResponse, Response
from fastapi.staticfiles import StaticFiles

from .attributes import (
    AttributeEntry,
    AttributeQuery,
    TexturePresetTable,
    load_presets,
    parse_hex_color,
    synthesize_record,
)
from .classes import CLASS_BY_KEY, MergedClass
from .config import EngineConfig, load_weights_file
from .errors import IngestError, QueryError, StoreError
from .features import FeatureRecord, extract_features
from .masks import load_person_image, parse_market_name
from .scoring import (
    GalleryMatrix,
    SimilarityReport,
    order_by_score,
    pair_score,
    score_against_gallery,
)
from .store import FeatureStore, record_to_dict

DEFAULT_MAX_K = 100


@dataclass(frozen=True)
class ServiceConfig:
    store_path: Path
    listen: str = "127.0.0.1:8000"
    weights_path: Path | None = None
    static_path: Path | None = None
    max_k: int = DEFAULT_MAX_K

    def validate(self) -> None:
        if self.max_k < 1:
            raise ValueError(f"max_k must be >= 1, got {self.max_k}")
        if not Path(self.store_path).exists():
            raise ValueError(f"store path does not exist: {self.store_path}")

    def host_port(self) -> tuple[str, int]:
        host, _, port = self.listen.rpartition(":")
        return host or "127.0.0.1", int(port)


def json_bytes(payload: dict) -> bytes:
    """The one serializer for search responses; keep byte-stable."""
    return json.dumps(payload, separators=(",", ":"), sort_keys=True).encode()


def similarity_report_dict(report: SimilarityReport) -> dict:
    classes = {}
    for class_id, breakdown in report.per_class.items():
        classes[MergedClass(class_id).key] = {
            "s_c": breakdown.s_c,
            "channels": breakdown.channels.as_dict(),
        }
    return {
        "shared_classes": [MergedClass(c).key for c in report.shared_classes],
        "no_shared_classes": report.no_shared_classes,
        "s_sim": report.s_sim,
        "s_simn": report.s_simn,
        "classes": classes,
    }


@dataclass
class _Snapshot:
    gallery: GalleryMatrix
    by_id: dict[str, FeatureRecord]


class _Engine:
    """Store handle plus the rebuildable in-memory gallery snapshot."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        self.store = FeatureStore(config.store_path)
        if config.weights_path:
            fw, cw = load_weights_file(config.weights_path)
            self.engine_config = EngineConfig(feature_weights=fw, class_weights=cw)
        else:
            self.engine_config = EngineConfig()
        self.presets: TexturePresetTable = load_presets()
        self._write_lock = threading.Lock()
        self._snapshot_lock = threading.Lock()
        self._snapshot: _Snapshot | None = None

    def snapshot(self) -> _Snapshot:
        with self._snapshot_lock:
            if self._snapshot is None:
                records = self.store.load_all()
                self._snapshot = _Snapshot(
                    gallery=GalleryMatrix(records),
                    by_id={r.image_id: r for r in records},
                )
            return self._snapshot

    def invalidate(self) -> None:
        with self._snapshot_lock:
            self._snapshot = None

    def clamp_k(self, k: int) -> int:
        if k < 1:
            raise HTTPException(400, f"k must be >= 1, got {k}")
        return min(k, self.config.max_k)

    def ranked_results(self, query: FeatureRecord, k: int, exclude_self: bool) -> list[dict]:
        snap = self.snapshot()
        if len(snap.gallery.ids) == 0:
            return []
        scores, _ = score_against_gallery(
            query,
            snap.gallery,
            self.engine_config.feature_weights,
            self.engine_config.class_weights,
            self.engine_config.k_d,
        )
        results = []
        for idx in order_by_score(snap.gallery.ids, scores):
            image_id = str(snap.gallery.ids[idx])
            if exclude_self and image_id == query.image_id:
                continue
            record = snap.by_id[image_id]
            report = pair_score(
                query,
                record,
                self.engine_config.feature_weights,
                self.engine_config.class_weights,
                self.engine_config.k_d,
            )
            entry = {
                "image_id": image_id,
                "score": float(scores[idx]),
                "person_id": record.person_id,
                "camera_id": record.camera_id,
            }
            entry.update(similarity_report_dict(report))
            results.append(entry)
            if len(results) >= k:
                break
        return results


def _parse_entry(raw: dict) -> AttributeEntry:
    if not isinstance(raw, dict) or "class" not in raw:
        raise QueryError(f"entry must be an object with a 'class' field, got {raw!r}")
    key = raw["class"]
    if isinstance(key, int):
        try:
            class_id = MergedClass(key)
        except ValueError:
            raise QueryError(f"unknown class id {key}") from None
    elif isinstance(key, str) and key in CLASS_BY_KEY:
        class_id = CLASS_BY_KEY[key]
    else:
        raise QueryError(f"unknown class {key!r}; one of {sorted(CLASS_BY_KEY)}")
    rgb = raw.get("rgb")
    if isinstance(rgb, str):
        rgb = parse_hex_color(rgb)
    elif isinstance(rgb, (list, tuple)) and len(rgb) == 3:
        rgb = tuple(int(v) for v in rgb)
    else:
        raise QueryError(f"rgb must be [r, g, b] or '#rrggbb', got {rgb!r}")
    preset = raw.get("texture_preset") or None
    return AttributeEntry(class_id=class_id, rgb=rgb, texture_preset=preset)


def create_app(config: ServiceConfig) -> FastAPI:
    config.validate()
    engine = _Engine(config)
    app = FastAPI(title="parseid", docs_url=None, redoc_url=None)
    app.state.engine = engine
    uploads_dir = Path(config.store_path) / "uploads"

    @app.post("/api/images")
    async def upload_image(image: UploadFile = File(...), mask: UploadFile = File(...)):
        image_name = Path(image.filename or "upload.png").name
        image_id = Path(image_name).stem
        with engine._write_lock:
            if image_id in engine.store:
                raise HTTPException(409, f"image_id {image_id!r} already in store")
            with tempfile.TemporaryDirectory() as tmp:
                # separate dirs: a .png image would otherwise share the
                # mask's path and get overwritten
                image_path = Path(tmp) / "image" / image_name
                mask_path = Path(tmp) / "mask" / (Path(image_id).name + ".png")
                image_path.parent.mkdir()
                mask_path.parent.mkdir()
                image_path.write_bytes(await image.read())
                mask_path.write_bytes(await mask.read())
                try:
                    person = load_person_image(image_path, mask_path)
                except IngestError as exc:
                    raise HTTPException(400, str(exc)) from None
                uploads_dir.mkdir(exist_ok=True)
                stored_image = uploads_dir / image_name
                shutil.copyfile(image_path, stored_image)
            parsed = parse_market_name(image_id)
            record = extract_features(
                person,
                engine.engine_config.extraction,
                extractor_version=engine.store.extractor_version,
                person_id=parsed[0] if parsed else None,
                camera_id=parsed[1] if parsed else None,
                source_paths={"image": str(stored_image)},
            )
            try:
                engine.store.put(record)
            except StoreError as exc:
                raise HTTPException(409, str(exc)) from None
            engine.invalidate()
        return {"image_id": image_id}

    @app.get("/api/search")
    def search_by_image(image_id: str, k: int = 10):
        k = engine.clamp_k(k)
        snap = engine.snapshot()
        if image_id not in snap.by_id:
            raise HTTPException(404, f"unknown image_id {image_id!r}")
        payload = {
            "query_id": image_id,
            "k": k,
            "results": engine.ranked_results(snap.by_id[image_id], k, exclude_self=True),
        }
        return Response(json_bytes(payload), media_type="application/json")

    @app.post("/api/search/attributes")
    async def search_attributes(request: Request):
        try:
            body = await request.json()
        except json.JSONDecodeError:
            raise HTTPException(400, "request body must be JSON") from None
        raw_entries = body.get("entries")
        if not isinstance(raw_entries, list) or not raw_entries:
            raise HTTPException(400, "entries must be a non-empty list")
        k = body.get("k", 10)
        if not isinstance(k, int):
            raise HTTPException(400, f"k must be an integer, got {k!r}")
        k = engine.clamp_k(k)
        try:
            query = AttributeQuery(tuple(_parse_entry(e) for e in raw_entries))
            query.validate()
            record = synthesize_record(query, engine.presets)
        except QueryError as exc:
            raise HTTPException(400, str(exc)) from None
        payload = {
            "query": {
                "entries": [
                    {
                        "class": e.class_id.key,
                        "rgb": list(e.rgb),
                        "texture_preset": e.texture_preset,
                    }
                    for e in query.entries
                ],
                "k": k,
            },
            "descriptor": record_to_dict(record),
            "results": engine.ranked_results(record, k, exclude_self=False),
        }
        return Response(json_bytes(payload), media_type="application/json")

    @app.get("/api/images")
    def list_images(limit: int = 200, offset: int = 0):
        ids = engine.store.image_ids()
        return {"count": len(ids), "image_ids": ids[offset : offset + max(0, limit)]}

    @app.get("/api/images/{image_id}/features")
    def image_features(image_id: str):
        try:
            return engine.store.get_dict(image_id)
        except KeyError:
            raise HTTPException(404, f"unknown image_id {image_id!r}") from None

    @app.get("/api/images/{image_id}/image")
    def image_file(image_id: str):
        try:
            record = engine.store.get(image_id)
        except KeyError:
            raise HTTPException(404, f"unknown image_id {image_id!r}") from None
        source = record.source_paths.get("image")
        if not source or not Path(source).exists():
            raise HTTPException(404, f"no stored image file for {image_id!r}")
        return FileResponse(source)

    @app.get("/api/presets")
    def list_presets():
        return {"presets": sorted(engine.presets)}

    @app.get("/api/classes")
    def list_classes():
        weights = engine.engine_config.class_weights
        return {
            "classes": [
                {"id": int(c), "key": c.key, "weight": weights[c]} for c in MergedClass
            ]
        }

    if config.static_path and Path(config.static_path).is_dir():
        app.mount("/", StaticFiles(directory=config.static_path, html=True), name="ui")

    return app
