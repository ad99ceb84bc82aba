"""Decoding of image + parsing-mask pairs into per-class pixel sets.

Masks are single-channel 8-bit indexed images whose pixel values are raw
LIP ids (the native output convention of SCHP-style parsers). They are
remapped to the merged 15-class scheme on load; background pixels are
marked absent.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .classes import BACKGROUND, MergedClass, N_LIP_LABELS, merge_labels
from .errors import IngestError

# Classes smaller than this are statistical noise and are dropped from the
# per-class pixel map before feature extraction.
MIN_CLASS_PIXELS = 16


@dataclass
class PersonImage:
    """Decoded RGB raster with its per-pixel merged-class mask.

    mask holds merged LIP ids, 0 where no class applies (background).
    rgb and mask always share their height and width.
    """

    image_id: str
    rgb: np.ndarray  # uint8[H, W, 3]
    mask: np.ndarray  # uint8[H, W], 0 = absent


def decode_image(path: str | Path) -> np.ndarray:
    """Decode any PIL-readable image to an 8-bit RGB raster."""
    try:
        with Image.open(path) as img:
            return np.asarray(img.convert("RGB"), dtype=np.uint8)
    except (UnidentifiedImageError, OSError) as exc:
        raise IngestError(f"cannot decode image {path}: {exc}") from exc


def decode_mask(path: str | Path) -> np.ndarray:
    """Decode a mask file to a raw LIP label raster.

    Accepts single-channel images; paletted images are read by index.
    """
    try:
        with Image.open(path) as img:
            if img.mode == "P":
                labels = np.asarray(img, dtype=np.uint8)
            else:
                labels = np.asarray(img.convert("L"), dtype=np.uint8)
    except (UnidentifiedImageError, OSError) as exc:
        raise IngestError(f"cannot decode mask {path}: {exc}") from exc
    return labels


def load_person_image(image_path: str | Path, mask_path: str | Path) -> PersonImage:
    """Load an image and its parsing mask into a merged-class PersonImage.

    Raises IngestError for undecodable files, dimension mismatches, label
    values outside the LIP range, and masks with no person pixels; the
    message names the offending path.
    """
    rgb = decode_image(image_path)
    labels = decode_mask(mask_path)
    if labels.shape != rgb.shape[:2]:
        raise IngestError(
            f"mask {mask_path} is {labels.shape[1]}x{labels.shape[0]} but image "
            f"{image_path} is {rgb.shape[1]}x{rgb.shape[0]}"
        )
    if labels.max(initial=0) >= N_LIP_LABELS:
        bad = int(labels.max())
        raise IngestError(f"mask {mask_path} holds unknown label value {bad}")
    merged = merge_labels(labels)
    if not (merged != BACKGROUND).any():
        raise IngestError(f"mask {mask_path} has no person pixels")
    return PersonImage(image_id=Path(image_path).stem, rgb=rgb, mask=merged)


def class_pixel_sets(
    img: PersonImage, min_class_pixels: int = MIN_CLASS_PIXELS
) -> dict[MergedClass, np.ndarray]:
    """Group non-background pixels by merged class.

    Returns a map class -> boolean mask of its pixels. Classes with fewer
    than min_class_pixels pixels are dropped; every retained non-background
    pixel belongs to exactly one class. Merging is idempotent, so masks
    that still carry raw labels (e.g. straight out of a renderer) group
    the same as pre-merged ones.
    """
    mask = merge_labels(img.mask)
    out: dict[MergedClass, np.ndarray] = {}
    present = np.unique(mask)
    for value in present:
        if value == BACKGROUND:
            continue
        region = mask == value
        if int(region.sum()) < min_class_pixels:
            continue
        out[MergedClass(int(value))] = region
    return out


_MARKET_NAME = re.compile(r"^(-?\d+)_c(\d+)")


def parse_market_name(image_id: str) -> tuple[int, int] | None:
    """(person_id, camera_id) from a `0007_c2s1_...` style id, else None.

    person_id -1 marks junk annotations and 0 marks distractors; both are
    preserved as-is for the evaluation protocol to interpret.
    """
    m = _MARKET_NAME.match(image_id)
    if m is None:
        return None
    return int(m.group(1)), int(m.group(2))


def mask_path_for(image_path: str | Path, mask_dir: str | Path, suffix: str = ".png") -> Path:
    """Default pairing convention: <image_stem>.png inside the mask directory."""
    return Path(mask_dir) / (Path(image_path).stem + suffix)
