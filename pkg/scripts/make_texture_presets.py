"""Rebuild the packaged texture preset table from the reference swatches.

    python3 scripts/make_texture_presets.py

Reads assets/swatches/{smooth,fine_knit,coarse}.png, regenerating any
missing swatch deterministically, measures contour and inner LBP
histograms over an inset window of each, and rewrites
src/parseid/data/texture_presets.json. The swatches and the JSON are both
committed; rerunning this script must be a no-op on a clean tree.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np
from PIL import Image

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from parseid.texture import lbp_histograms  # noqa: E402

SWATCH_DIR = ROOT / "assets" / "swatches"
OUT_PATH = ROOT / "src" / "parseid" / "data" / "texture_presets.json"
SIZE = 64
# Keep the measured window off the raster border so the contour ring of the
# window itself has valid LBP neighborhoods.
MARGIN = 4


def _smooth(rng: np.random.Generator) -> np.ndarray:
    return np.full((SIZE, SIZE), 128.0) + rng.normal(0.0, 1.2, (SIZE, SIZE))


def _fine_knit(rng: np.random.Generator) -> np.ndarray:
    rows = np.arange(SIZE)[:, None]
    cols = np.arange(SIZE)[None, :]
    gray = 128.0 + 9.0 * np.sin(2 * np.pi * rows / 3.0) + 7.0 * np.sin(2 * np.pi * cols / 3.0)
    return gray + rng.normal(0.0, 2.0, (SIZE, SIZE))


def _coarse(rng: np.random.Generator) -> np.ndarray:
    rows = np.arange(SIZE)[:, None]
    cols = np.arange(SIZE)[None, :]
    gray = 128.0 + 22.0 * np.sin(2 * np.pi * rows / 9.0) * np.sin(2 * np.pi * cols / 11.0)
    return gray + rng.normal(0.0, 4.0, (SIZE, SIZE))


SWATCHES = {"smooth": (_smooth, 11), "fine_knit": (_fine_knit, 12), "coarse": (_coarse, 13)}


def ensure_swatch(name: str) -> Path:
    path = SWATCH_DIR / f"{name}.png"
    if not path.exists():
        generator, seed = SWATCHES[name]
        gray = generator(np.random.default_rng(seed))
        gray = np.clip(np.rint(gray), 0, 255).astype(np.uint8)
        path.parent.mkdir(parents=True, exist_ok=True)
        Image.fromarray(gray, mode="L").save(path)
        print(f"generated {path.relative_to(ROOT)}")
    return path


def _sparse(hist) -> dict:
    bins = {str(code): float(v) for code, v in enumerate(hist.bins) if v}
    return {"n_codes": hist.n_codes, "bins": bins}


def measure(path: Path) -> dict:
    gray = np.asarray(Image.open(path).convert("L"))
    region = np.zeros(gray.shape, dtype=bool)
    region[MARGIN:-MARGIN, MARGIN:-MARGIN] = True
    contour, inner = lbp_histograms(gray, region)
    if contour.n_codes == 0 or inner.n_codes == 0:
        raise SystemExit(f"{path}: swatch produced an empty histogram")
    return {"contour": _sparse(contour), "inner": _sparse(inner)}


def main() -> None:
    table = {name: measure(ensure_swatch(name)) for name in SWATCHES}
    OUT_PATH.parent.mkdir(parents=True, exist_ok=True)
    OUT_PATH.write_text(json.dumps(table, indent=1, sort_keys=True) + "\n")
    print(f"wrote {OUT_PATH.relative_to(ROOT)}")


if __name__ == "__main__":
    main()
