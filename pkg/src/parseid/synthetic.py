"""Procedural figure dataset for end-to-end tests and demos.

Renders simple person-shaped rasters (hair, face, torso garment, arms,
pants, shoes) straight in native Lab with exact masks, so retrieval quality
can be asserted without any real dataset. Twenty identities ship by
default:

* fourteen with well-separated shirt hues (robust to illumination), and
* six wearing neutral gray shirts whose L levels form a geometric ladder.

The gray group is deliberately adversarial: under multiplicative L changes
a darker shirt lit brightly aliases exactly onto a lighter shirt lit dimly,
so mean-color distance cannot tell them apart. What does differ is the
shape of the L histogram (each gray shirt is a two-tone weave with its own
tone separation), which is what histogram stretching preserves.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import cos, pi, sin
from pathlib import Path
from typing import Callable

import numpy as np
from PIL import Image

from .color import lab_to_rgb
from .masks import PersonImage

HEIGHT, WIDTH = 128, 64

# Per-view horizontal offsets, so views are never pixel-identical.
_VIEW_DX = (0, 1, 2, 1)

# An illumination map assigns every (person_id, view) its own global L
# factor, like sightings under independent lighting.
IlluminationMap = Callable[[int, int], float]


def jittered_illumination(low: float = 0.8, high: float = 1.2) -> IlluminationMap:
    """Deterministic per-image L factors spread evenly over [low, high].

    Golden-ratio spacing keeps consecutive images far apart in factor while
    covering the range densely, so no two sightings share their lighting.
    """
    phi = 0.6180339887498949

    def factor(person_id: int, view: int) -> float:
        t = ((person_id * 4 + view + 1) * phi) % 1.0
        return low + (high - low) * t

    return factor

_SKIN = (65.0, 18.0, 27.0)

_PANTS = ((25.0, 2.0, -20.0), (12.0, 0.0, 0.0), (55.0, 5.0, 25.0), (40.0, 0.0, -5.0))
_HAIR = ((18.0, 4.0, 6.0), (28.0, 10.0, 18.0), (12.0, 0.0, 0.0))
_SHOES = ((15.0, 3.0, 8.0), (45.0, 0.0, -18.0), (8.0, 0.0, 0.0))

# Near-black wardrobe for the gray group: at L this low a 0.8-1.2 factor
# moves the histogram by at most a bin or two, so these classes score about
# the same for every gray pair and the shirt decides the ranking.
_GRAY_PANTS = (7.0, 0.0, 0.0)
_GRAY_HAIR = (6.0, 0.0, 0.0)
_GRAY_SHOES = (5.0, 1.0, 2.0)

# Gray shirts: (base L, +-tone L), both native. Levels are placed so that
# pairs alias under the 0.8-1.2 illumination range (a dim sighting of a
# lighter shirt hits the same mean L as a bright sighting of a darker one);
# the identity cue is the histogram shape left by the weave tones. A global
# factor scales level and tone together, so aliasable pairs keep their
# tone/level ratios at least 1.5x apart: the small-tone shirt stretches
# into one solid block, the large-tone one into islands clear of it.
_GRAY_SHIRTS = (
    (28.0, 3.0),
    (30.8, 12.0),
    (50.0, 14.0),
    (37.27, 22.0),
)
_GRAY_DITHER = 0.8


@dataclass(frozen=True)
class FigureSpec:
    person_id: int
    shirt_lab: tuple[float, float, float]
    pants_lab: tuple[float, float, float]
    hair_lab: tuple[float, float, float]
    shoe_lab: tuple[float, float, float]
    shirt_label: int = 5  # raw LIP id of the torso garment (5, 6 or 7)
    shirt_tones: tuple[float, ...] = (-8.0, 8.0)  # native L offsets of the weave
    shirt_block: int = 3  # weave block size in pixels
    shirt_dither: float = 0.8  # extra +-native-L noise on the shirt
    has_skin: bool = True  # False renders no face/arm classes (hooded figure)


def _ring(radius: float, angle_deg: float, l_value: float) -> tuple[float, float, float]:
    rad = angle_deg * pi / 180.0
    return (l_value, radius * cos(rad), radius * sin(rad))


def default_identities() -> list[FigureSpec]:
    """The standard 20 identities (person ids 1..20; 7 wears the red shirt)."""
    specs: list[FigureSpec] = []
    hue_shirts: dict[int, tuple[float, float, float]] = {}
    ring1_pids = (1, 2, 3, 4, 5, 6, 8, 9)
    for i, pid in enumerate(ring1_pids):
        hue_shirts[pid] = _ring(50.0, 56.0 + i * 45.0, 45.0)
    # The exact native Lab of #d22b2b, so attribute queries for that hex hit
    # this identity's shirt dead on.
    hue_shirts[7] = (46.27450980392157, 63.0, 42.0)
    for i, pid in enumerate(range(10, 17)):
        hue_shirts[pid] = _ring(28.0, 30.0 + i * (360.0 / 7), 65.0)

    for i, pid in enumerate(sorted(hue_shirts)):
        specs.append(
            FigureSpec(
                person_id=pid,
                shirt_lab=hue_shirts[pid],
                pants_lab=_PANTS[i % len(_PANTS)],
                hair_lab=_HAIR[i % len(_HAIR)],
                shoe_lab=_SHOES[i % len(_SHOES)],
                shirt_label=6 if pid == 3 else 7 if pid == 4 else 5,
                shirt_block=3 + i % 3,
            )
        )
    for k, (base, tone) in enumerate(_GRAY_SHIRTS):
        specs.append(
            FigureSpec(
                person_id=17 + k,
                shirt_lab=(base, 0.0, 0.0),
                pants_lab=_GRAY_PANTS,
                hair_lab=_GRAY_HAIR,
                shoe_lab=_GRAY_SHOES,
                shirt_tones=(-tone, tone),
                shirt_block=3,
                shirt_dither=_GRAY_DITHER,
                has_skin=False,
            )
        )
    return specs


def _regions(dx: int, shirt_label: int, has_skin: bool) -> list[tuple[int, slice, slice]]:
    """(raw LIP label, row slice, col slice), painted in order."""
    regions = [
        (2, slice(6, 21), slice(22 + dx, 43 + dx)),  # hair
        (13, slice(16, 31), slice(24 + dx, 41 + dx)),  # face (overwrites hair)
        (shirt_label, slice(30, 71), slice(16 + dx, 49 + dx)),
        (14, slice(32, 61), slice(10 + dx, 17 + dx)),  # left arm
        (15, slice(32, 61), slice(48 + dx, 55 + dx)),  # right arm
        (9, slice(70, 105), slice(18 + dx, 47 + dx)),  # pants
        (18, slice(104, 113), slice(18 + dx, 31 + dx)),  # left shoe
        (19, slice(104, 113), slice(34 + dx, 47 + dx)),  # right shoe
    ]
    if not has_skin:
        regions = [r for r in regions if r[0] not in (13, 14, 15)]
    return regions


def render_view(spec: FigureSpec, view: int, illumination: float = 1.0) -> PersonImage:
    """Render one camera view of a figure; the image is fully deterministic.

    The mask holds raw LIP labels (merged on load like any real mask). View
    index v maps to camera v+1. illumination multiplies native L globally
    before conversion to sRGB.
    """
    dx = _VIEW_DX[view % len(_VIEW_DX)]
    lab = np.zeros((HEIGHT, WIDTH, 3), dtype=np.float64)
    lab[..., 0] = 95.0  # flat light background
    mask = np.zeros((HEIGHT, WIDTH), dtype=np.uint8)

    colors = {
        2: spec.hair_lab,
        13: _SKIN,
        spec.shirt_label: spec.shirt_lab,
        14: _SKIN,
        15: _SKIN,
        9: spec.pants_lab,
        18: spec.shoe_lab,
        19: spec.shoe_lab,
    }
    rng = np.random.default_rng(abs(hash((spec.person_id, view))) % (2**32))
    for label, rows, cols in _regions(dx, spec.shirt_label, spec.has_skin):
        lab[rows, cols] = colors[label]
        mask[rows, cols] = label
        if label == spec.shirt_label:
            # Weave: the tone set cycles over a fixed block grid. Extra
            # shirt dither drowns the weave's phase count out of LBP while
            # the tone spikes still shape the L histogram.
            rr, cc = np.mgrid[rows, cols]
            phase = ((rr // spec.shirt_block) + (cc // spec.shirt_block)) % len(spec.shirt_tones)
            tones = np.asarray(spec.shirt_tones)
            lab[rows, cols, 0] += tones[phase]
            lab[rows, cols, 0] += rng.uniform(-spec.shirt_dither, spec.shirt_dither, phase.shape)

    lab[..., 0] += rng.uniform(-0.8, 0.8, size=(HEIGHT, WIDTH))
    lab[..., 0] *= illumination

    frame = spec.person_id * 4 + view
    image_id = f"{spec.person_id:04d}_c{view + 1}s1_{frame:06d}_00"
    return PersonImage(image_id=image_id, rgb=lab_to_rgb(lab), mask=mask)


def generate_dataset(
    image_dir: str | Path,
    mask_dir: str | Path,
    specs: list[FigureSpec] | None = None,
    views: int = 4,
    illumination: IlluminationMap | None = None,
) -> list[str]:
    """Write image/mask PNG pairs for every (identity, view); returns ids.

    illumination maps (person_id, view) to a global L factor; None means
    flat lighting everywhere.
    """
    specs = specs if specs is not None else default_identities()
    image_dir, mask_dir = Path(image_dir), Path(mask_dir)
    image_dir.mkdir(parents=True, exist_ok=True)
    mask_dir.mkdir(parents=True, exist_ok=True)
    ids = []
    for spec in specs:
        for view in range(views):
            factor = illumination(spec.person_id, view) if illumination else 1.0
            person = render_view(spec, view, illumination=factor)
            Image.fromarray(person.rgb).save(image_dir / f"{person.image_id}.png")
            Image.fromarray(person.mask, mode="L").save(mask_dir / f"{person.image_id}.png")
            ids.append(person.image_id)
    return ids


def shirt_rgb(spec: FigureSpec) -> tuple[int, int, int]:
    """Rendered sRGB of the shirt's base color (for attribute queries)."""
    pixel = lab_to_rgb(np.array([[spec.shirt_lab]], dtype=np.float64))[0, 0]
    return int(pixel[0]), int(pixel[1]), int(pixel[2])
