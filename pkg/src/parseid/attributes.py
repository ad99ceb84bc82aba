"""Image-free search: turn a human attribute description (class -> color,
optional texture preset) into a synthetic FeatureRecord and rank a gallery
against it.

The synthesized record looks exactly like an extracted one to the scoring
layer: the color becomes a window of ones around its encoded Lab bins plus
the exact Lab mean, textures come from a preset table of typical clothing
surfaces, and classes the operator did not mention are simply absent, so
the shared-class rule restricts scoring to what was described.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .classes import CLASS_BY_KEY, MergedClass
from .color import BinarizedHistogram, LabMean, N_BINS, BIN_FOLD, rgb_to_lab
from .errors import QueryError
from .evaluation import RankingResult
from .features import ClassFeatures, FeatureRecord
from .scoring import ClassWeights, FeatureWeights, GalleryMatrix, order_by_score, score_against_gallery
from .texture import LbpHistogram, N_CODES

DEFAULT_SPREAD = 2


@dataclass(frozen=True)
class AttributeEntry:
    class_id: MergedClass
    rgb: tuple[int, int, int]
    texture_preset: str | None = None


@dataclass(frozen=True)
class AttributeQuery:
    """One entry per described class; undescribed classes stay absent."""

    entries: tuple[AttributeEntry, ...]

    def validate(self) -> None:
        if not self.entries:
            raise QueryError("attribute query needs at least one entry")
        seen: set[MergedClass] = set()
        for entry in self.entries:
            if entry.class_id in seen:
                raise QueryError(f"duplicate class in query: {entry.class_id.key}")
            seen.add(entry.class_id)
            if any(not (0 <= v <= 255) for v in entry.rgb):
                raise QueryError(f"color out of range for {entry.class_id.key}: {entry.rgb}")


def parse_hex_color(text: str) -> tuple[int, int, int]:
    """'#d22b2b' or 'd22b2b' -> (210, 43, 43)."""
    text = text.strip().lstrip("#")
    if len(text) != 6:
        raise QueryError(f"expected a 6-digit hex color, got {text!r}")
    try:
        return tuple(int(text[i : i + 2], 16) for i in (0, 2, 4))  # type: ignore[return-value]
    except ValueError:
        raise QueryError(f"not a hex color: {text!r}") from None


def parse_attr_option(text: str) -> AttributeEntry:
    """'upper_clothes=#d22b2b' or 'pants=#000000:coarse' -> AttributeEntry."""
    key, sep, value = text.partition("=")
    if not sep:
        raise QueryError(f"expected 'class=#rrggbb', got {text!r}")
    key = key.strip()
    if key not in CLASS_BY_KEY:
        raise QueryError(f"unknown class {key!r}; one of {sorted(CLASS_BY_KEY)}")
    color_text, _, preset = value.partition(":")
    return AttributeEntry(
        class_id=CLASS_BY_KEY[key],
        rgb=parse_hex_color(color_text),
        texture_preset=preset.strip() or None,
    )


# ---------------------------------------------------------------------------
# Texture presets

TexturePresetTable = dict[str, tuple[LbpHistogram, LbpHistogram]]  # (contour, inner)


def _lbp_from_sparse(region: str, d: dict) -> LbpHistogram:
    bins = np.zeros(N_CODES, dtype=np.float64)
    for code, value in d["bins"].items():
        bins[int(code)] = float(value)
    return LbpHistogram(region=region, bins=bins, n_codes=int(d["n_codes"]))


def load_presets(path: str | Path | None = None) -> TexturePresetTable:
    """Load the preset table; the packaged default ships three entries
    (smooth, fine_knit, coarse) measured from reference swatches."""
    if path is None:
        text = resources.files("parseid").joinpath("data/texture_presets.json").read_text()
    else:
        text = Path(path).read_text()
    raw = json.loads(text)
    return {
        name: (
            _lbp_from_sparse("contour", entry["contour"]),
            _lbp_from_sparse("inner", entry["inner"]),
        )
        for name, entry in raw.items()
    }


def _absent_lbp(region: str) -> LbpHistogram:
    return LbpHistogram(region=region, bins=np.zeros(N_CODES, dtype=np.float64), n_codes=0)


def _window_bits(center_bin: int, spread: int) -> np.ndarray:
    bits = np.zeros(N_BINS, dtype=bool)
    bits[max(0, center_bin - spread) : min(N_BINS - 1, center_bin + spread) + 1] = True
    return bits


def synthesize_record(
    query: AttributeQuery,
    presets: TexturePresetTable | None = None,
    spread: int = DEFAULT_SPREAD,
    image_id: str = "attribute-query",
    extractor_version: str = "synthetic",
) -> FeatureRecord:
    """Build a scorable FeatureRecord from an attribute description.

    Each color converts to its encoded Lab triplet; the binarized histogram
    of each channel gets ones in the window of +-spread bins around the
    color's bin (clamped at the edges), and the Lab mean is the triplet
    itself. A named preset fills both texture channels, otherwise they are
    absent and their weight redistributes.
    """
    query.validate()
    if spread < 0:
        raise QueryError("spread must be >= 0")
    presets = presets if presets is not None else load_presets()
    classes: dict[MergedClass, ClassFeatures] = {}
    for entry in query.entries:
        encoded = rgb_to_lab(np.array([[entry.rgb]], dtype=np.uint8))[0, 0]
        if entry.texture_preset is not None:
            if entry.texture_preset not in presets:
                raise QueryError(
                    f"unknown texture preset {entry.texture_preset!r}; "
                    f"available: {sorted(presets)}"
                )
            contour, inner = presets[entry.texture_preset]
        else:
            contour, inner = _absent_lbp("contour"), _absent_lbp("inner")
        hists = {}
        for channel, value in zip("Lab", encoded):
            hists[channel] = BinarizedHistogram(
                channel=channel,
                bits=_window_bits(int(value) // BIN_FOLD, spread),
                threshold_used=0.0,
            )
        classes[entry.class_id] = ClassFeatures(
            hist_l=hists["L"],
            hist_a=hists["a"],
            hist_b=hists["b"],
            mean=LabMean(l=float(encoded[0]), a=float(encoded[1]), b=float(encoded[2])),
            over_highlighted=False,
            lbp_contour=contour,
            lbp_inner=inner,
            n_pixels=0,
        )
    return FeatureRecord(
        image_id=image_id,
        classes=classes,
        extractor_version=extractor_version,
    )


def search_by_attributes(
    query: AttributeQuery,
    gallery: GalleryMatrix | list[FeatureRecord],
    k: int,
    presets: TexturePresetTable | None = None,
    spread: int = DEFAULT_SPREAD,
    feature_weights: FeatureWeights | None = None,
    class_weights: ClassWeights | None = None,
) -> RankingResult:
    """Top-k gallery records by S_sim against the synthesized descriptor.

    Only the described classes can be shared, so everything else is ignored
    by construction. k beyond the gallery size returns the full ranking.
    """
    if k < 1:
        raise QueryError("k must be >= 1")
    if not isinstance(gallery, GalleryMatrix):
        gallery = GalleryMatrix(gallery)
    record = synthesize_record(query, presets=presets, spread=spread)
    scores, _ = score_against_gallery(record, gallery, feature_weights, class_weights)
    order = order_by_score(gallery.ids, scores)[:k]
    return RankingResult(
        query_id=record.image_id,
        ranked=[(str(gallery.ids[i]), float(scores[i])) for i in order],
    )
