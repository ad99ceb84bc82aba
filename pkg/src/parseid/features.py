"""Per-image feature extraction: one ClassFeatures bundle per merged class.

Extraction walks the image once: pixels are converted to encoded Lab and
grayscale, an LBP code map is built for the whole raster, and every
sufficiently large parsing class gets binarized Lab histograms, a Lab mean
triplet, the over-highlight flag and two LBP histograms.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import color, texture
from .classes import MergedClass
from .color import BinarizedHistogram, LabMean
from .masks import MIN_CLASS_PIXELS, PersonImage, class_pixel_sets
from .texture import LbpHistogram


@dataclass
class ExtractionConfig:
    """Constants governing feature extraction.

    stretch_l toggles the lightness-histogram stretching step (kept as a
    switch so its effect on illumination robustness can be measured).
    remove_shadows enables an experimental shadow-peak heuristic and is off
    by default.
    """

    min_class_pixels: int = MIN_CLASS_PIXELS
    k_inc: float = color.K_INC
    over_highlight_fraction: float = color.OVER_HIGHLIGHT_FRACTION
    stretch_l: bool = True
    remove_shadows: bool = False


@dataclass
class ClassFeatures:
    """All descriptors of one merged class in one image."""

    hist_l: BinarizedHistogram
    hist_a: BinarizedHistogram
    hist_b: BinarizedHistogram
    mean: LabMean
    over_highlighted: bool
    lbp_contour: LbpHistogram
    lbp_inner: LbpHistogram
    n_pixels: int


@dataclass
class FeatureRecord:
    """The persisted per-image bundle of ClassFeatures."""

    image_id: str
    classes: dict[MergedClass, ClassFeatures]
    extractor_version: str
    person_id: int | None = None
    camera_id: int | None = None
    source_paths: dict[str, str] = field(default_factory=dict)


def extract_class_features(
    lab: np.ndarray,
    region: np.ndarray,
    code_map: np.ndarray,
    config: ExtractionConfig,
) -> ClassFeatures:
    """Descriptors for one class region of an encoded-Lab raster."""
    pixels = lab[region]
    n_pixels = int(pixels.shape[0])

    raw_l = color.raw_histogram(pixels[:, 0])
    over = (
        float(raw_l[color.N_BINS_RAW - 1])
        > config.over_highlight_fraction * n_pixels
    )

    hist_l = color.ChannelHistogram("L", color.reduce_bins(raw_l), n_pixels)
    if config.remove_shadows:
        hist_l = color.remove_shadow_peak(hist_l)
    if config.stretch_l:
        hist_l = color.stretch_l(hist_l)
    hist_a = color.build_histogram(pixels[:, 1], "a")
    hist_b = color.build_histogram(pixels[:, 2], "b")

    contour_hist, inner_hist = texture.lbp_histograms(None, region, code_map=code_map)

    return ClassFeatures(
        hist_l=color.binarize(hist_l, config.k_inc),
        hist_a=color.binarize(hist_a, config.k_inc),
        hist_b=color.binarize(hist_b, config.k_inc),
        mean=color.lab_mean(pixels),
        over_highlighted=over,
        lbp_contour=contour_hist,
        lbp_inner=inner_hist,
        n_pixels=n_pixels,
    )


def extract_features(
    person: PersonImage,
    config: ExtractionConfig | None = None,
    extractor_version: str = "",
    person_id: int | None = None,
    camera_id: int | None = None,
    source_paths: dict[str, str] | None = None,
) -> FeatureRecord:
    """Extract a FeatureRecord from a decoded PersonImage.

    Deterministic: identical inputs yield an identical record regardless of
    where or how often this runs.
    """
    config = config or ExtractionConfig()
    lab = color.rgb_to_lab(person.rgb)
    gray = texture.grayscale(person.rgb)
    code_map = texture.lbp_code_map(gray)

    classes: dict[MergedClass, ClassFeatures] = {}
    for class_id, region in class_pixel_sets(person, config.min_class_pixels).items():
        classes[class_id] = extract_class_features(lab, region, code_map, config)

    return FeatureRecord(
        image_id=person.image_id,
        classes=classes,
        extractor_version=extractor_version,
        person_id=person_id,
        camera_id=camera_id,
        source_paths=dict(source_paths or {}),
    )
