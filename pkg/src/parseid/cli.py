"""Command line entry points: extract, evaluate, search, serve, inspect.

Exit code is 0 only when the requested operation fully succeeded. The one
documented exception: extract exits 0 when some images failed to parse,
reporting them in the summary, because a partial gallery is still usable.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from .attributes import (
    DEFAULT_SPREAD,
    AttributeQuery,
    parse_attr_option,
    search_by_attributes,
)
from .classes import MergedClass
from .color import decode_lab
from .config import EngineConfig, extractor_version, load_weights_file
from .errors import ParseidError
from .evaluation import evaluate, load_split, rank_query, write_query_csv
from .features import ExtractionConfig
from .scoring import GalleryMatrix
from .store import FeatureStore, build_from_dataset
from .texture import MIN_CODES

_WORKERS_DEFAULT = os.cpu_count() or 1


def _engine_config(weights: str | None) -> EngineConfig:
    if weights is None:
        return EngineConfig()
    fw, cw = load_weights_file(weights)
    return EngineConfig(feature_weights=fw, class_weights=cw)


def _fail(message: str) -> "click.ClickException":
    return click.ClickException(message)


@click.group()
@click.version_option(package_name="parseid")
def main() -> None:
    """Person re-identification from parsed images: color and texture
    descriptors per body class, no training required."""


@main.command()
@click.option("--images", "image_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--masks", "mask_dir", type=click.Path(file_okay=False), default=None,
              help="Mask directory; defaults to a 'masks' directory next to --images.")
@click.option("--store", "store_dir", required=True, type=click.Path(file_okay=False))
@click.option("--workers", type=int, default=_WORKERS_DEFAULT, show_default="logical CPUs")
@click.option("--overwrite", is_flag=True, help="Re-extract images already in the store.")
def extract(image_dir: str, mask_dir: str | None, store_dir: str, workers: int, overwrite: bool) -> None:
    """Extract features for every image in a directory into a store."""
    if workers < 1:
        raise _fail(f"--workers must be >= 1, got {workers}")
    if mask_dir is None:
        mask_dir = str(Path(image_dir).parent / "masks")
    if not Path(mask_dir).is_dir():
        raise _fail(f"mask directory does not exist: {mask_dir}")
    config = ExtractionConfig()
    try:
        store = FeatureStore.open_or_create(store_dir, extractor_version(config))
        report = build_from_dataset(
            store, image_dir, mask_dir, config=config, workers=workers, overwrite=overwrite
        )
    except ParseidError as exc:
        raise _fail(str(exc)) from None
    summary = {
        "built": report.n_built,
        "failed": report.n_failed,
        "skipped": report.n_skipped,
        "elapsed_s": round(report.elapsed_s, 3),
        "failures": [{"path": p, "reason": r} for p, r in report.failures],
    }
    click.echo(json.dumps(summary, indent=2))


def _parse_ranks(text: str) -> tuple[int, ...]:
    try:
        ranks = tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise _fail(f"--ranks expects comma-separated integers, got {text!r}") from None
    if not ranks or any(r < 1 for r in ranks):
        raise _fail(f"--ranks must be positive, got {text!r}")
    return ranks


@main.command("evaluate")
@click.option("--test", "test_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--query", "query_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--store", "store_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--clear-queries", type=click.Path(exists=True, dir_okay=False), default=None,
              help="File of image ids to remove from the query set.")
@click.option("--cross-camera", is_flag=True,
              help="Per query, drop gallery images from the same id+camera and junk ids.")
@click.option("--ranks", default="1,5,10", show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--weights", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--workers", type=int, default=_WORKERS_DEFAULT, show_default="logical CPUs")
@click.option("--figures/--no-figures", default=True, show_default=True,
              help="Render CMC and AP figures next to --out.")
def evaluate_cmd(
    test_dir: str,
    query_dir: str,
    store_dir: str,
    clear_queries: str | None,
    cross_camera: bool,
    ranks: str,
    out_path: str,
    weights: str | None,
    workers: int,
    figures: bool,
) -> None:
    """Rank every query against the test gallery and report rank-r / mAP."""
    rank_list = _parse_ranks(ranks)
    config = _engine_config(weights)
    try:
        store = FeatureStore(store_dir)
        split = load_split(test_dir, query_dir, clear_query_list=clear_queries)
        summary, rows = evaluate(
            store,
            split,
            cross_camera=cross_camera,
            ranks=rank_list,
            feature_weights=config.feature_weights,
            class_weights=config.class_weights,
            workers=max(1, workers),
        )
    except ParseidError as exc:
        raise _fail(str(exc)) from None

    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(summary.to_dict(), indent=2) + "\n")
    base = out.with_suffix("")
    csv_path = Path(f"{base}_queries.csv")
    write_query_csv(csv_path, rows)
    outputs = [str(out), str(csv_path)]
    if figures:
        from . import report as report_figures

        outputs.append(str(report_figures.save_cmc_figure(rows, f"{base}_cmc.png")))
        outputs.append(str(report_figures.save_ap_histogram(rows, f"{base}_ap.png")))
    for r in rank_list:
        click.echo(f"rank_{r}: {summary.rank_scores[r]:.2f}%")
    click.echo(f"mAP: {summary.mean_ap:.2f}%")
    click.echo(f"queries: {summary.n_queries}  gallery: {summary.n_gallery}")
    click.echo("wrote " + ", ".join(outputs))


@main.command()
@click.option("--store", "store_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--attr", "attrs", multiple=True,
              help="class=#rrggbb[:preset], repeatable, e.g. upper_clothes=#d22b2b:smooth")
@click.option("--image-id", default=None, help="Rank by example instead of attributes.")
@click.option("-k", type=int, default=10, show_default=True)
@click.option("--spread", type=int, default=DEFAULT_SPREAD, show_default=True,
              help="Half-width in bins of the color window around each attribute color.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None,
              help="Write results JSON here instead of stdout.")
@click.option("--weights", type=click.Path(exists=True, dir_okay=False), default=None)
def search(
    store_dir: str,
    attrs: tuple[str, ...],
    image_id: str | None,
    k: int,
    spread: int,
    out_path: str | None,
    weights: str | None,
) -> None:
    """Search a store by attribute description or by example image."""
    if bool(attrs) == bool(image_id):
        raise _fail("give either --attr entries or --image-id, not both")
    if k < 1:
        raise _fail(f"-k must be >= 1, got {k}")
    config = _engine_config(weights)
    try:
        store = FeatureStore(store_dir)
        gallery = GalleryMatrix(store.load_all())
        if attrs:
            query = AttributeQuery(tuple(parse_attr_option(a) for a in attrs))
            result = search_by_attributes(
                query,
                gallery,
                k=k,
                spread=spread,
                feature_weights=config.feature_weights,
                class_weights=config.class_weights,
            )
            ranked = result.ranked
            payload_query = {"attributes": list(attrs), "spread": spread}
        else:
            record = store.get(image_id)
            result = rank_query(
                record,
                gallery,
                cross_camera=False,
                feature_weights=config.feature_weights,
                class_weights=config.class_weights,
            )
            ranked = [(rid, score) for rid, score in result.ranked if rid != image_id][:k]
            payload_query = {"image_id": image_id}
    except KeyError:
        raise _fail(f"unknown image_id {image_id!r}") from None
    except ParseidError as exc:
        raise _fail(str(exc)) from None
    payload = {
        "query": payload_query,
        "results": [{"image_id": rid, "score": score} for rid, score in ranked],
    }
    text = json.dumps(payload, indent=2) + "\n"
    if out_path:
        Path(out_path).write_text(text)
        click.echo(f"wrote {out_path}")
    else:
        click.echo(text, nl=False)


@main.command()
@click.option("--store", "store_dir", envvar="PARSEID_STORE", required=True,
              type=click.Path(exists=True, file_okay=False),
              help="Feature store directory (env PARSEID_STORE).")
@click.option("--listen", envvar="PARSEID_LISTEN", default="127.0.0.1:8000",
              show_default=True, help="host:port (env PARSEID_LISTEN).")
@click.option("--static", "static_dir", type=click.Path(file_okay=False), default=None,
              help="Directory of UI assets to serve at /.")
@click.option("--weights", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--max-k", type=int, default=100, show_default=True)
def serve(store_dir: str, listen: str, static_dir: str | None, weights: str | None, max_k: int) -> None:
    """Serve the HTTP search API (and the UI when --static is given)."""
    import uvicorn

    from .service import ServiceConfig, create_app

    config = ServiceConfig(
        store_path=Path(store_dir),
        listen=listen,
        weights_path=Path(weights) if weights else None,
        static_path=Path(static_dir) if static_dir else None,
        max_k=max_k,
    )
    try:
        app = create_app(config)
        host, port = config.host_port()
    except (ValueError, ParseidError) as exc:
        raise _fail(str(exc)) from None
    uvicorn.run(app, host=host, port=port, log_level="info")


def _bit_string(bits) -> str:
    return "".join("1" if b else "0" for b in bits)


def _top_codes(hist, n: int = 3) -> str:
    if hist.n_codes == 0:
        return "absent"
    pairs = [(code, hist.bins[code]) for code in MIN_CODES if hist.bins[code] > 0]
    pairs.sort(key=lambda t: (-t[1], t[0]))
    body = " ".join(f"{code}:{value:.3f}" for code, value in pairs[:n])
    return f"n={hist.n_codes} {body}"


@main.command()
@click.argument("image_id")
@click.option("--store", "store_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--json", "as_json", is_flag=True, help="Print the stored record verbatim.")
@click.option("--figure", "figure_path", type=click.Path(dir_okay=False), default=None,
              help="Also render the record's features to this PNG.")
def inspect(image_id: str, store_dir: str, as_json: bool, figure_path: str | None) -> None:
    """Show the stored features of one image."""
    try:
        store = FeatureStore(store_dir)
        record = store.get(image_id)
    except KeyError:
        raise _fail(f"unknown image_id {image_id!r}") from None
    except ParseidError as exc:
        raise _fail(str(exc)) from None

    if as_json:
        click.echo(json.dumps(store.get_dict(image_id), indent=2))
    else:
        click.echo(f"image_id: {record.image_id}")
        click.echo(f"extractor_version: {record.extractor_version}")
        click.echo(f"person_id: {record.person_id}  camera_id: {record.camera_id}")
        for class_id in sorted(record.classes):
            feats = record.classes[class_id]
            native = decode_lab(feats.mean.as_array())
            click.echo(f"\n{MergedClass(class_id).key}  ({feats.n_pixels} px)")
            click.echo(f"  mean Lab: {native[0]:.2f} {native[1]:.2f} {native[2]:.2f}")
            click.echo(f"  over-highlighted: {'yes' if feats.over_highlighted else 'no'}")
            click.echo(f"  L bits: {_bit_string(feats.hist_l.bits)}")
            click.echo(f"  a bits: {_bit_string(feats.hist_a.bits)}")
            click.echo(f"  b bits: {_bit_string(feats.hist_b.bits)}")
            click.echo(f"  lbp inner:   {_top_codes(feats.lbp_inner)}")
            click.echo(f"  lbp contour: {_top_codes(feats.lbp_contour)}")
    if figure_path:
        from . import report as report_figures

        report_figures.save_feature_figure(record, figure_path)
        click.echo(f"wrote {figure_path}", err=False)


if __name__ == "__main__":
    sys.exit(main())
